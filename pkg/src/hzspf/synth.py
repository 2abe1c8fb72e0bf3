"""Synthetic test scenes with exact ground truth.

A scene is a flat background, a list of disks and rectangles painted in
order, an additive bias field and optional noise.  The ground truth is the
union of the shape supports; bias and noise never change it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import NoiseSpec, add_noise

__all__ = ["Shape", "Bias", "SynthSpec", "generate", "SUITES", "suite_cases"]

SHAPE_KINDS = ("disk", "rectangle")
BIAS_KINDS = ("none", "linear", "radial")


@dataclass(frozen=True)
class Shape:
    """A disk (``size = (radius,)``) or rectangle (``size = (width, height)``).

    ``center`` is ``(x, y)`` in pixel coordinates.
    """

    kind: str
    center: tuple
    size: tuple
    intensity: float

    def support(self, width, height):
        yy, xx = np.mgrid[0:height, 0:width]
        cx, cy = self.center
        if self.kind == "disk":
            (r,) = self.size
            return (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        sw, sh = self.size
        return (np.abs(xx - cx) <= sw / 2) & (np.abs(yy - cy) <= sh / 2)


@dataclass(frozen=True)
class Bias:
    kind: str = "none"
    amplitude: float = 0.0


@dataclass(frozen=True)
class SynthSpec:
    width: int
    height: int
    shapes: tuple = ()
    background_intensity: float = 0.0
    bias: Bias = Bias()
    noise: NoiseSpec | None = None
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.width, int) and isinstance(self.height, int)
                and self.width >= 3 and self.height >= 3):
            raise ValueError(f"width/height: must be integers >= 3, got {self.width}x{self.height}")
        if not 0.0 <= self.background_intensity <= 1.0:
            raise ValueError(f"background_intensity: must lie in [0, 1], got {self.background_intensity}")
        for i, s in enumerate(self.shapes):
            if s.kind not in SHAPE_KINDS:
                raise ValueError(f"shapes[{i}].kind: unknown shape {s.kind!r}")
            if not 0.0 <= s.intensity <= 1.0:
                raise ValueError(f"shapes[{i}].intensity: must lie in [0, 1], got {s.intensity}")
            if len(s.size) != (1 if s.kind == "disk" else 2) or any(v <= 0 for v in s.size):
                raise ValueError(f"shapes[{i}].size: invalid size {s.size!r} for a {s.kind}")
            if len(s.center) != 2:
                raise ValueError(f"shapes[{i}].center: expected (x, y), got {s.center!r}")
        if self.bias.kind not in BIAS_KINDS:
            raise ValueError(f"bias.kind: unknown bias {self.bias.kind!r}")
        if not (math.isfinite(self.bias.amplitude) and abs(self.bias.amplitude) <= 1.0):
            raise ValueError(f"bias.amplitude: must lie in [-1, 1], got {self.bias.amplitude}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed: must be a 64-bit unsigned integer, got {self.seed}")

    def to_dict(self):
        return {
            "width": self.width,
            "height": self.height,
            "shapes": [
                {"kind": s.kind, "center": list(s.center), "size": list(s.size), "intensity": s.intensity}
                for s in self.shapes
            ],
            "background_intensity": self.background_intensity,
            "bias": {"kind": self.bias.kind, "amplitude": self.bias.amplitude},
            "noise": None if self.noise is None else self.noise.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        allowed = {"width", "height", "shapes", "background_intensity", "bias", "noise", "seed"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ValueError(f"{unknown[0]}: unknown synth key")
        shapes = tuple(
            Shape(s["kind"], tuple(s["center"]), tuple(s["size"]), float(s["intensity"]))
            for s in data.pop("shapes", ())
        )
        bias = Bias(**data.pop("bias", {}))
        noise = data.pop("noise", None)
        noise = NoiseSpec.from_dict(noise) if noise is not None else None
        return cls(shapes=shapes, bias=bias, noise=noise, **data)


def _bias_field(spec):
    h, w = spec.height, spec.width
    amp = spec.bias.amplitude
    if spec.bias.kind == "none" or amp == 0:
        return np.zeros((h, w))
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    if spec.bias.kind == "linear":
        return amp * (xx / w - 0.5) * 2.0
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    r = np.hypot(xx - cx, yy - cy)
    return amp * (1.0 - r / r.max())


def generate(spec):
    """Render ``spec`` into ``(image, truth)``."""
    h, w = spec.height, spec.width
    image = np.full((h, w), float(spec.background_intensity))
    truth = np.zeros((h, w), dtype=bool)
    for s in spec.shapes:
        support = s.support(w, h)
        image[support] = s.intensity
        truth |= support
    image = np.clip(image + _bias_field(spec), 0.0, 1.0)
    if spec.noise is not None:
        image = add_noise(image, spec.noise)
    return image, truth


# ---------------------------------------------------------------------------
# named benchmark suites
# ---------------------------------------------------------------------------

SIZE = 128


def _single(noise=None, seed=0):
    return SynthSpec(
        SIZE, SIZE,
        shapes=(Shape("disk", (64.0, 64.0), (34.0,), 0.75),),
        background_intensity=0.25,
        bias=Bias("linear", 0.15),
        noise=noise,
        seed=seed,
    )


def _multi3(seed=0):
    return SynthSpec(
        SIZE, SIZE,
        shapes=(
            Shape("disk", (45.0, 46.0), (18.0,), 0.75),
            Shape("disk", (83.0, 46.0), (18.0,), 0.70),
            Shape("rectangle", (64.0, 84.0), (52.0, 22.0), 0.80),
        ),
        background_intensity=0.25,
        bias=Bias("linear", 0.15),
        seed=seed,
    )


def suite_cases(name, seed=0):
    """Return ``[(case_name, SynthSpec), ...]`` for a named suite.

    Noise seeds are derived from ``seed`` so a suite is reproducible as a whole.
    """
    if name == "single-bias":
        return [("single-bias", _single(seed=seed))]
    if name == "multi3-bias":
        return [("multi3-bias", _multi3(seed=seed))]
    if name == "noise-sweep":
        return [
            (f"gaussian-{v:.2f}", _single(NoiseSpec("gaussian", 0.0, v, seed=seed + i), seed))
            for i, v in enumerate((0.01, 0.02, 0.03, 0.04))
        ]
    if name == "noise-types":
        specs = (
            ("gaussian", NoiseSpec("gaussian", 0.0, 0.01, seed=seed)),
            ("salt_pepper", NoiseSpec("salt_pepper", density=0.01, seed=seed + 1)),
            ("poisson", NoiseSpec("poisson", seed=seed + 2)),
            ("speckle", NoiseSpec("speckle", 0.0, 0.01, seed=seed + 3)),
        )
        return [(kind, _single(noise, seed)) for kind, noise in specs]
    raise ValueError(f"suite: unknown suite {name!r}; expected one of {SUITES}")


SUITES = ("single-bias", "multi3-bias", "noise-sweep", "noise-types")
