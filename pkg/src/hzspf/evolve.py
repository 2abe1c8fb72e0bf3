"""Level-set evolution: the hybrid-pressure model and the two baselines.

All three solvers share the same explicit time stepping, convergence test
and report.  ``run_hzspf`` and ``run_sbgfrls`` advance the level set with a
signed pressure times ``alpha * |grad phi|`` and then regularize it;
``run_cv`` integrates the classical two-phase piecewise-constant flow.
"""
from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .grid import as_field
from .regionstats import (
    convolve,
    dirac,
    heaviside,
    local_energies,
    local_fit,
    make_kernel,
    default_radius,
    region_stats,
)
from .spf import DegenerateRegionError, spf_global, spf_hybrid, spf_local, spf_sbgfrls

__all__ = [
    "MODELS",
    "Rect",
    "Circle",
    "ModelParams",
    "RunReport",
    "parse_geometry",
    "init_phi",
    "grad_mag",
    "step",
    "regularize",
    "converged",
    "cv_data_force",
    "curvature",
    "run_hzspf",
    "run_cv",
    "run_sbgfrls",
    "run_model",
]

MODELS = ("hzspf", "cv", "sbgfrls")

PHI_FLOOR = 1e-12
GRAD_FLOOR = 1e-8


@dataclass(frozen=True)
class Rect:
    """Half-open pixel box ``[left, right) x [top, bottom)``."""

    left: int
    top: int
    right: int
    bottom: int

    def __str__(self):
        return f"rect:{self.left},{self.top},{self.right},{self.bottom}"


@dataclass(frozen=True)
class Circle:
    """Disk of pixel centers within ``radius`` of ``(cx, cy)``."""

    cx: float
    cy: float
    radius: float

    def __str__(self):
        return f"circle:{self.cx:g},{self.cy:g},{self.radius:g}"


def parse_geometry(text, width, height):
    """Parse ``auto``, ``rect:l,t,r,b`` or ``circle:cx,cy,r``.

    ``auto`` is the centered box spanning 60% of each dimension.
    """
    text = text.strip().lower()
    if text == "auto":
        return Rect(
            int(round(0.2 * width)),
            int(round(0.2 * height)),
            int(round(0.8 * width)),
            int(round(0.8 * height)),
        )
    kind, _, rest = text.partition(":")
    try:
        nums = [float(v) for v in rest.split(",")]
    except ValueError:
        raise ValueError(f"init: cannot parse geometry {text!r}") from None
    if kind == "rect" and len(nums) == 4:
        if any(v != int(v) for v in nums):
            raise ValueError(f"init: rectangle bounds must be integers, got {text!r}")
        return Rect(*(int(v) for v in nums))
    if kind == "circle" and len(nums) == 3:
        return Circle(*nums)
    raise ValueError(f"init: expected 'auto', 'rect:l,t,r,b' or 'circle:cx,cy,r', got {text!r}")


@dataclass(frozen=True)
class ModelParams:
    """Solver settings shared by all three models.

    ``mu`` and ``nu`` are accepted for completeness but no update uses them.
    ``lambda1``, ``lambda2`` and ``mu_cv`` only affect :func:`run_cv`.
    """

    alpha: float = 20.0
    w: float = 0.7
    epsilon: float = 1.0
    sigma_fit: float = 3.0
    radius_fit: int = 9
    sigma_reg: float = 1.0
    dt: float = 1.0
    eta: float = 1e-8
    conv_T: float = 0.01
    max_iter: int = 300
    binary_step: bool = True
    init: str = "auto"
    c0: float = 1.0
    mu: float = 0.0
    nu: float = 0.0
    lambda1: float = 1.0
    lambda2: float = 1.0
    mu_cv: float = 0.0

    def __post_init__(self):
        positive = ("alpha", "epsilon", "sigma_fit", "dt", "conv_T", "c0", "lambda1", "lambda2")
        nonneg = ("sigma_reg", "eta", "mu", "nu", "mu_cv")
        for name in positive + nonneg + ("w",):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name}: expected a finite number, got {value!r}")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name}: must be > 0, got {getattr(self, name)!r}")
        for name in nonneg:
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name}: must be >= 0, got {getattr(self, name)!r}")
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"w: must lie in [0, 1], got {self.w!r}")
        for name, low in (("radius_fit", 1), ("max_iter", 1)):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < low:
                raise ValueError(f"{name}: must be an integer >= {low}, got {value!r}")
        if not isinstance(self.binary_step, bool):
            raise ValueError(f"binary_step: expected true/false, got {self.binary_step!r}")
        if not isinstance(self.init, str):
            raise ValueError(f"init: expected a geometry string, got {self.init!r}")
        # syntax check only; bounds depend on the image
        parse_geometry(self.init, 100, 100)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ValueError(f"{unknown[0]}: unknown parameter")
        return cls(**{k: _coerce(k, known[k].type, v) for k, v in data.items()})


def _coerce(name, typename, value):
    """Convert config/CLI values (possibly strings) to the field's type."""
    try:
        if typename == "bool":
            if isinstance(value, str):
                low = value.strip().lower()
                if low in ("1", "true", "yes", "on"):
                    return True
                if low in ("0", "false", "no", "off"):
                    return False
                raise ValueError
            return value
        if typename == "int":
            if isinstance(value, str):
                return int(value)
            if isinstance(value, float) and value.is_integer():
                return int(value)
            return value
        if typename == "float":
            if isinstance(value, str):
                return float(value)
            if isinstance(value, int) and not isinstance(value, bool):
                return float(value)
            return value
        return value
    except ValueError:
        raise ValueError(f"{name}: cannot interpret {value!r} as {typename}") from None


@dataclass
class RunReport:
    model: str
    iterations: int = 0
    residuals: list = field(default_factory=list)
    converged: bool = False
    wall_time: float = 0.0
    seed: int | None = None
    params: dict = field(default_factory=dict)


def init_phi(width, height, init, c0):
    """Binary level set: ``+c0`` inside the geometry, ``-c0`` outside."""
    geom = parse_geometry(init, width, height) if isinstance(init, str) else init
    if isinstance(geom, Rect):
        if not (0 <= geom.left < geom.right <= width and 0 <= geom.top < geom.bottom <= height):
            raise ValueError(f"init: {geom} does not fit in a {width}x{height} image")
        inside = np.zeros((height, width), dtype=bool)
        inside[geom.top:geom.bottom, geom.left:geom.right] = True
    else:
        r = geom.radius
        if not (r > 0 and geom.cx - r >= 0 and geom.cy - r >= 0
                and geom.cx + r <= width - 1 and geom.cy + r <= height - 1):
            raise ValueError(f"init: {geom} does not fit in a {width}x{height} image")
        yy, xx = np.mgrid[0:height, 0:width]
        inside = (xx - geom.cx) ** 2 + (yy - geom.cy) ** 2 <= r * r
    return np.where(inside, c0, -c0).astype(np.float64)


def _central_diffs(phi):
    p = np.pad(phi, 1, mode="edge")
    d_row = 0.5 * (p[2:, 1:-1] - p[:-2, 1:-1])
    d_col = 0.5 * (p[1:-1, 2:] - p[1:-1, :-2])
    return d_row, d_col


def grad_mag(phi, eta):
    """``sqrt(d_row**2 + d_col**2 + eta)`` with unit-spacing central differences."""
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    d_row, d_col = _central_diffs(np.asarray(phi, dtype=np.float64))
    return np.sqrt(d_row * d_row + d_col * d_col + eta)


def step(phi, spf, params):
    """One forward-Euler step of ``phi_t = spf * alpha * |grad phi|``."""
    phi = np.asarray(phi, dtype=np.float64)
    values = getattr(spf, "values", spf)
    if values.shape != phi.shape:
        raise ValueError(f"step: shape mismatch {phi.shape} vs {values.shape}")
    return phi + params.dt * params.alpha * values * grad_mag(phi, params.eta)


def regularize(phi, params):
    """Optional snap to ``+-c0`` followed by optional Gaussian smoothing."""
    phi = np.asarray(phi, dtype=np.float64)
    if params.binary_step:
        phi = np.where(phi >= 0, params.c0, -params.c0)
    if params.sigma_reg > 0:
        phi = convolve(phi, make_kernel(params.sigma_reg, default_radius(params.sigma_reg)))
    return phi


def converged(phi_new, phi_old, T):
    """Relative change ``max|new - old| / max|old|`` and whether it is below ``T``."""
    phi_new = np.asarray(phi_new)
    phi_old = np.asarray(phi_old)
    if phi_new.shape != phi_old.shape:
        raise ValueError(f"converged: shape mismatch {phi_new.shape} vs {phi_old.shape}")
    change = float(np.max(np.abs(phi_new - phi_old)))
    scale = max(float(np.max(np.abs(phi_old))), PHI_FLOOR)
    residual = change / scale
    return residual < T, residual


def cv_data_force(image, phi, c1, c2, params):
    """``-delta(phi) * (lambda1 (I - c1)**2 - lambda2 (I - c2)**2)``."""
    fit = params.lambda1 * (image - c1) ** 2 - params.lambda2 * (image - c2) ** 2
    return -dirac(phi, params.epsilon) * fit


def curvature(phi):
    """``div(grad phi / |grad phi|)`` by central differences, ``|grad phi|`` floored."""
    d_row, d_col = _central_diffs(phi)
    norm = np.maximum(np.sqrt(d_row * d_row + d_col * d_col), GRAD_FLOOR)
    n_row, _ = _central_diffs(d_row / norm)
    _, n_col = _central_diffs(d_col / norm)
    return n_row + n_col


def _weighted_means(image, phi, epsilon):
    h = heaviside(phi, epsilon)
    inside = float(h.sum())
    outside = float((1.0 - h).sum())
    c1 = float((image * h).sum()) / max(inside, PHI_FLOOR)
    c2 = float((image * (1.0 - h)).sum()) / max(outside, PHI_FLOOR)
    return c1, c2


def _check_stats(stats, n):
    if stats.degenerate and n > 1:
        side = "inside" if stats.inside_empty else "outside"
        raise DegenerateRegionError(
            f"the {side} region of the contour became empty at iteration {n}", iteration=n
        )


def _drive(image, params, model, velocity, regularized, seed, callback):
    """Shared time loop.

    ``velocity(phi, n)`` returns the updated level set before regularization.
    A step that leaves ``phi`` untouched is a fixed point and ends the run
    without regularizing.
    """
    image = as_field(image, "image")
    params = params or ModelParams()
    h, w = image.shape
    phi = init_phi(w, h, params.init, params.c0)
    report = RunReport(model=model, seed=seed, params=params.to_dict())
    start = time.perf_counter()
    for n in range(1, params.max_iter + 1):
        moved = velocity(phi, n)
        if not np.all(np.isfinite(moved)):
            raise FloatingPointError(f"{model}: level set diverged at iteration {n}")
        frozen = np.array_equal(moved, phi)
        new = moved if frozen or not regularized else regularize(moved, params)
        done, residual = converged(new, phi, params.conv_T)
        phi = new
        report.iterations = n
        report.residuals.append(residual)
        if callback is not None:
            callback(n, phi)
        if done:
            report.converged = True
            break
    report.wall_time = time.perf_counter() - start
    return phi, report


def run_hzspf(image, params=None, *, seed=None, stats_hook=None, callback=None):
    """Segment ``image`` with the hybrid global/local pressure model.

    Each iteration updates the crisp region statistics, the local fitting
    means and energies, blends the global and local pressures with weight
    ``w``, takes one explicit step and regularizes.

    Parameters
    ----------
    image : array_like
        2-D intensities in ``[0, 1]``.
    params : ModelParams, optional
    seed : int, optional
        Recorded in the report only (e.g. the noise seed of the input).
    stats_hook : callable, optional
        Maps the computed :class:`RegionStats` to the ones actually used.
    callback : callable, optional
        Called as ``callback(iteration, phi)`` after every iteration.

    Returns
    -------
    phi : ndarray
    report : RunReport
    """
    params = params or ModelParams()
    image = as_field(image, "image")
    kernel = make_kernel(params.sigma_fit, params.radius_fit)

    def velocity(phi, n):
        stats = region_stats(image, phi)
        _check_stats(stats, n)
        if stats_hook is not None:
            stats = stats_hook(stats)
        fields = local_fit(image, phi, kernel, params.epsilon)
        fields = local_energies(image, phi, fields, kernel, params.epsilon)
        g = spf_global(image, stats, strict=False)
        l = spf_local(fields.e1, fields.e2)
        return step(phi, spf_hybrid(g, l, params.w), params)

    return _drive(image, params, "hzspf", velocity, True, seed, callback)


def run_sbgfrls(image, params=None, *, seed=None, stats_hook=None, callback=None):
    """Segment ``image`` with the global mean-threshold pressure and Gaussian regularization.

    Takes the same arguments as :func:`run_hzspf`.
    """
    params = params or ModelParams()
    image = as_field(image, "image")

    def velocity(phi, n):
        stats = region_stats(image, phi)
        _check_stats(stats, n)
        if stats_hook is not None:
            stats = stats_hook(stats)
        return step(phi, spf_sbgfrls(image, stats, strict=False), params)

    return _drive(image, params, "sbgfrls", velocity, True, seed, callback)


def run_cv(image, params=None, *, seed=None, callback=None):
    """Two-phase piecewise-constant flow with smoothed-Heaviside region means.

    ``phi += dt * (data_force + mu_cv * delta(phi) * curvature(phi))``; no
    Gaussian regularization is applied.
    """
    params = params or ModelParams()
    image = as_field(image, "image")

    def velocity(phi, n):
        c1, c2 = _weighted_means(image, phi, params.epsilon)
        force = cv_data_force(image, phi, c1, c2, params)
        if params.mu_cv > 0:
            force = force + params.mu_cv * dirac(phi, params.epsilon) * curvature(phi)
        return phi + params.dt * force

    return _drive(image, params, "cv", velocity, False, seed, callback)


_RUNNERS = {"hzspf": run_hzspf, "cv": run_cv, "sbgfrls": run_sbgfrls}


def run_model(model, image, params=None, *, seed=None):
    try:
        runner = _RUNNERS[model]
    except KeyError:
        raise ValueError(f"model: unknown model {model!r}; expected one of {MODELS}") from None
    return runner(image, params, seed=seed)
