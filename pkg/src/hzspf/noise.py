"""Seeded noise injection: Gaussian, salt-and-pepper, Poisson and speckle."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .grid import as_field

__all__ = ["NOISE_KINDS", "NoiseSpec", "add_noise"]

NOISE_KINDS = ("gaussian", "salt_pepper", "poisson", "speckle")

# photon count corresponding to intensity 1.0
_POISSON_SCALE = 255.0


@dataclass(frozen=True)
class NoiseSpec:
    """Parameters of one noise injection.

    ``mean`` only applies to Gaussian noise, ``variance`` to Gaussian and
    speckle noise and ``density`` to salt-and-pepper noise.  Variances are in
    normalized ``[0, 1]`` intensity units.
    """

    kind: str
    mean: float = 0.0
    variance: float = 0.01
    density: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if not (self.variance >= 0 and math.isfinite(self.variance)):
            raise ValueError(f"noise variance must be >= 0, got {self.variance}")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"noise density must lie in [0, 1], got {self.density}")
        if not math.isfinite(self.mean):
            raise ValueError("noise mean must be finite")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def add_noise(image, spec):
    """Return a noisy copy of ``image`` clamped to ``[0, 1]``.

    The same ``(image, spec)`` pair always yields the same output; the
    generator is PCG64 seeded with ``spec.seed``.
    """
    image = as_field(image, "image")
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    std = math.sqrt(spec.variance)

    if spec.kind == "gaussian":
        out = image + rng.normal(spec.mean, std, size=image.shape)
    elif spec.kind == "speckle":
        out = image + image * rng.normal(0.0, std, size=image.shape)
    elif spec.kind == "poisson":
        out = rng.poisson(_POISSON_SCALE * image) / _POISSON_SCALE
    else:
        out = image.copy()
        n = image.size
        count = int(round(spec.density * n))
        if count:
            idx = rng.choice(n, size=count, replace=False)
            out.flat[idx] = rng.integers(0, 2, size=count).astype(np.float64)
    return np.clip(out, 0.0, 1.0)
