"""Level-set segmentation driven by a hybrid global/local signed pressure function."""

__version__ = "0.1.0"

from .evolve import ModelParams, RunReport, run_cv, run_hzspf, run_model, run_sbgfrls
from .grid import load_image, mask_from_phi, save_image
from .metrics import MetricPair, evaluate
from .noise import NoiseSpec, add_noise
from .synth import SynthSpec, generate, suite_cases

__all__ = [
    "ModelParams",
    "RunReport",
    "run_hzspf",
    "run_cv",
    "run_sbgfrls",
    "run_model",
    "load_image",
    "save_image",
    "mask_from_phi",
    "MetricPair",
    "evaluate",
    "NoiseSpec",
    "add_noise",
    "SynthSpec",
    "generate",
    "suite_cases",
]
