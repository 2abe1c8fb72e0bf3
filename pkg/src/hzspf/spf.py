"""Signed pressure functions.

Every field here lies in ``[-1, 1]``.  Positive pressure pushes the contour
outward at a pixel and negative pressure pulls it inward.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SPF_KINDS",
    "SpfField",
    "DegenerateRegionError",
    "CollapsedPhasesError",
    "spf_sbgfrls",
    "global_threshold",
    "spf_global",
    "spf_local",
    "spf_hybrid",
]

log = logging.getLogger(__name__)

SPF_KINDS = ("global", "local", "hybrid", "sbgfrls")
ZERO_TOL = 1e-12


class DegenerateRegionError(ValueError):
    """One side of the contour is empty, so its statistics are meaningless."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class CollapsedPhasesError(ValueError):
    """Inside and outside means coincide; the median threshold is undefined."""


@dataclass(frozen=True)
class SpfField:
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in SPF_KINDS:
            raise ValueError(f"unknown SPF kind {self.kind!r}")


def _normalize(num):
    """Scale by the largest magnitude; an (almost) zero numerator gives zeros."""
    peak = float(np.max(np.abs(num)))
    if peak < ZERO_TOL:
        return np.zeros_like(num)
    return num / peak


def _require_regions(stats, strict):
    if strict and stats.degenerate:
        side = "inside" if stats.inside_empty else "outside"
        raise DegenerateRegionError(f"the {side} region of the contour is empty")


def spf_sbgfrls(image, stats, strict=True):
    """Pressure ``I - (c1 + c2)/2`` scaled to unit peak magnitude."""
    _require_regions(stats, strict)
    image = np.asarray(image, dtype=np.float64)
    return SpfField(_normalize(image - 0.5 * (stats.c1 + stats.c2)), "sbgfrls")


def global_threshold(stats):
    """Intensity level where the median-aware global pressure changes sign.

    Equals ``(c1 + c2)/2`` whenever the inside median equals the inside mean.
    """
    c1, c2, m = stats.c1, stats.c2, stats.m
    gap = c1 - c2
    if abs(gap) <= ZERO_TOL:
        raise CollapsedPhasesError(f"c1 = {c1!r} and c2 = {c2!r} coincide")
    return ((c1 - 2.0 * m) ** 2 - c2 * c2) / (2.0 * gap)


def spf_global(image, stats, strict=True):
    """Global pressure from the inside mean, outside mean and inside median.

    When ``c1`` and ``c2`` coincide the threshold falls back to their mean.
    """
    _require_regions(stats, strict)
    image = np.asarray(image, dtype=np.float64)
    try:
        level = global_threshold(stats)
    except CollapsedPhasesError:
        log.debug("collapsed phases (c1=%r, c2=%r), using midpoint threshold", stats.c1, stats.c2)
        level = 0.5 * (stats.c1 + stats.c2)
    return SpfField(_normalize(image - level), "global")


def spf_local(e1, e2):
    """Local pressure ``e2 - e1`` scaled by the peak of ``|e2 - e1|``."""
    e1 = np.asarray(e1, dtype=np.float64)
    e2 = np.asarray(e2, dtype=np.float64)
    if e1.shape != e2.shape:
        raise ValueError(f"spf_local: shape mismatch {e1.shape} vs {e2.shape}")
    return SpfField(_normalize(e2 - e1), "local")


def spf_hybrid(g, l, w):
    """Convex blend ``w * g + (1 - w) * l``; no renormalization."""
    if g.kind != "global" or l.kind != "local":
        raise ValueError(f"spf_hybrid expects (global, local) fields, got ({g.kind}, {l.kind})")
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"hybrid weight must lie in [0, 1], got {w}")
    if g.values.shape != l.values.shape:
        raise ValueError(f"spf_hybrid: shape mismatch {g.values.shape} vs {l.values.shape}")
    return SpfField(w * g.values + (1.0 - w) * l.values, "hybrid")
