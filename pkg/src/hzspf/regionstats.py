"""Region statistics used by the pressure functions.

Smoothed Heaviside/Dirac pair, crisp global statistics (inside mean,
outside mean, inside median), separable Gaussian smoothing with replicate
padding, and the Gaussian-windowed local fitting means and energies.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RegionStats",
    "GaussianKernel",
    "LocalFields",
    "heaviside",
    "dirac",
    "region_stats",
    "make_kernel",
    "default_radius",
    "convolve",
    "local_fit",
    "local_energies",
    "window_energies",
    "factored_gap",
]

DENOM_FLOOR = 1e-12


def _check_eps(epsilon):
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")


def heaviside(phi, epsilon):
    """Smoothed step ``0.5 * (1 + (2/pi) * arctan(phi / epsilon))``."""
    _check_eps(epsilon)
    return 0.5 * (1.0 + (2.0 / np.pi) * np.arctan(np.divide(phi, epsilon)))


def dirac(phi, epsilon):
    """Derivative of :func:`heaviside`: ``epsilon / (pi * (epsilon**2 + phi**2))``."""
    _check_eps(epsilon)
    return (1.0 / np.pi) * epsilon / (epsilon * epsilon + np.square(phi))


@dataclass(frozen=True)
class RegionStats:
    """Inside mean ``c1``, outside mean ``c2`` and inside median ``m``.

    ``inside_empty``/``outside_empty`` record that a region had no pixels and
    its statistics fell back to the global mean.
    """

    c1: float
    c2: float
    m: float
    inside_empty: bool = False
    outside_empty: bool = False

    @property
    def degenerate(self):
        return self.inside_empty or self.outside_empty


def _check_same_shape(a, b, what):
    if a.shape != b.shape:
        raise ValueError(f"{what}: shape mismatch {a.shape} vs {b.shape}")


def region_stats(image, phi):
    """Crisp statistics over ``{phi >= 0}`` and ``{phi < 0}``.

    The median of an even-sized set is the mean of its two middle values.
    An empty region takes the global mean and is flagged.
    """
    image = np.asarray(image, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    _check_same_shape(image, phi, "region_stats")
    inside = phi >= 0
    inner = image[inside]
    outer = image[~inside]
    global_mean = float(image.mean())
    if inner.size:
        c1 = float(inner.mean())
        m = float(np.median(inner))
    else:
        c1 = m = global_mean
    c2 = float(outer.mean()) if outer.size else global_mean
    return RegionStats(c1, c2, m, inside_empty=not inner.size, outside_empty=not outer.size)


@dataclass(frozen=True)
class GaussianKernel:
    """Normalized 1-D Gaussian taps, applied along each axis in turn."""

    sigma: float
    radius: int
    taps: np.ndarray = dataclasses.field(repr=False)

    @property
    def size(self):
        return 2 * self.radius + 1


def default_radius(sigma):
    """Truncation radius ``round(3 * sigma)``, at least 1."""
    return max(1, int(round(3.0 * sigma)))


def make_kernel(sigma, radius=None):
    if not sigma > 0:
        raise ValueError(f"kernel sigma must be > 0, got {sigma}")
    if radius is None:
        radius = default_radius(sigma)
    if int(radius) != radius or radius < 1:
        raise ValueError(f"kernel radius must be an integer >= 1, got {radius}")
    radius = int(radius)
    d = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(d * d) / (2.0 * sigma * sigma))
    taps /= taps.sum()
    # enforce exact symmetry after normalization
    taps = 0.5 * (taps + taps[::-1])
    taps.setflags(write=False)
    return GaussianKernel(float(sigma), radius, taps)


def _smooth_axis(a, taps, axis):
    r = (len(taps) - 1) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    p = np.pad(a, pad, mode="edge")
    n = a.shape[axis]
    out = np.zeros_like(a)
    for k, t in enumerate(taps):
        if axis == 0:
            out += t * p[k:k + n, :]
        else:
            out += t * p[:, k:k + n]
    return out


def convolve(field, kernel):
    """Separable Gaussian smoothing, rows first then columns.

    Borders use replicate padding, so the kernel may be wider than the field.
    """
    field = np.asarray(field, dtype=np.float64)
    return _smooth_axis(_smooth_axis(field, kernel.taps, 1), kernel.taps, 0)


@dataclass(frozen=True)
class LocalFields:
    """Local fitting means ``f1``/``f2`` and local energies ``e1``/``e2``."""

    f1: np.ndarray
    f2: np.ndarray
    e1: np.ndarray | None = None
    e2: np.ndarray | None = None


def local_fit(image, phi, kernel, epsilon):
    """Gaussian-weighted means of the image inside and outside the contour."""
    image = np.asarray(image, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    _check_same_shape(image, phi, "local_fit")
    h = heaviside(phi, epsilon)
    num1 = convolve(h * image, kernel)
    den1 = convolve(h, kernel)
    num2 = convolve((1.0 - h) * image, kernel)
    den2 = convolve(1.0 - h, kernel)
    f1 = num1 / np.maximum(den1, DENOM_FLOOR)
    f2 = num2 / np.maximum(den2, DENOM_FLOOR)
    return LocalFields(f1, f2)


def local_energies(image, phi, fields, kernel, epsilon):
    """Fill ``e1``/``e2``: Heaviside-weighted squared residuals to ``f1``/``f2``.

    Uses ``e = A - 2 f B + f**2 C`` with ``A = K*(I**2 M)``, ``B = K*(I M)``,
    ``C = K*M`` and ``M`` the inside or outside membership.
    """
    image = np.asarray(image, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    _check_same_shape(image, phi, "local_energies")
    _check_same_shape(image, fields.f1, "local_energies")
    h = heaviside(phi, epsilon)
    sq = image * image

    def energy(weight, f):
        a = convolve(sq * weight, kernel)
        b = convolve(image * weight, kernel)
        c = convolve(weight, kernel)
        return np.maximum(a - 2.0 * f * b + f * f * c, 0.0)

    e1 = energy(h, fields.f1)
    e2 = energy(1.0 - h, fields.f2)
    return dataclasses.replace(fields, e1=e1, e2=e2)


def window_energies(image, fields, kernel):
    """Unweighted window residuals ``K*((I - f1)**2)`` and ``K*((I - f2)**2)``.

    Unlike :func:`local_energies` every pixel in the window contributes to
    both energies.  Their difference factors exactly as :func:`factored_gap`.
    """
    image = np.asarray(image, dtype=np.float64)
    a = convolve(image * image, kernel)
    b = convolve(image, kernel)

    def energy(f):
        return np.maximum(a - 2.0 * f * b + f * f, 0.0)

    return energy(fields.f1), energy(fields.f2)


def factored_gap(image, fields, kernel):
    """``2 * K*(I - (f1 + f2)/2) * (f1 - f2)``, the sign-revealing form of e2 - e1."""
    mid = 0.5 * (fields.f1 + fields.f2)
    return 2.0 * (convolve(np.asarray(image, dtype=np.float64), kernel) - mid) * (fields.f1 - fields.f2)
