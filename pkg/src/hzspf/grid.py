"""Scalar fields, binary masks and 8-bit image I/O.

A scalar field is a ``float64`` array of shape ``(height, width)`` holding
finite values; a mask is a ``bool`` array of the same shape.  Images are
normalized to ``[0, 1]`` on load.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

__all__ = [
    "ImageError",
    "as_field",
    "load_image",
    "save_image",
    "save_mask",
    "mask_from_phi",
    "mask_boundary",
]

MIN_SIZE = 3

_PGM_HEADER = re.compile(
    rb"\AP5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s"
)
_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageError(ValueError):
    """Raised for unreadable, unsupported or malformed images."""


def as_field(values, name="field"):
    """Validate ``values`` as a scalar field and return it as float64.

    The result is a fresh C-contiguous copy, so callers may not mutate the
    input through it.
    """
    arr = np.array(values, dtype=np.float64, copy=True, order="C")
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    h, w = arr.shape
    if h < MIN_SIZE or w < MIN_SIZE:
        raise ValueError(f"{name} must be at least {MIN_SIZE}x{MIN_SIZE}, got {w}x{h}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def _read_pgm(buf, path):
    match = _PGM_HEADER.match(buf)
    if match is None:
        raise ImageError(f"{path}: malformed PGM header")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != 255:
        raise ImageError(f"{path}: only 8-bit PGM (maxval 255) is supported, got {maxval}")
    offset = match.end()
    count = width * height
    if len(buf) - offset < count:
        raise ImageError(f"{path}: truncated PGM data")
    return np.frombuffer(buf, dtype=np.uint8, count=count, offset=offset).reshape(height, width)


def _read_png(path):
    from PIL import Image

    with Image.open(path) as im:
        if im.mode != "L":
            raise ImageError(f"{path}: PNG mode {im.mode!r} is not 8-bit grayscale")
        return np.asarray(im, dtype=np.uint8)


def load_image(path):
    """Read an 8-bit grayscale PGM (P5) or PNG and scale it to ``[0, 1]``.

    Color or 16-bit inputs are rejected rather than converted.
    """
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise ImageError(f"{path}: cannot read ({exc.strerror})") from exc
    if buf.startswith(b"P5"):
        pixels = _read_pgm(buf, path)
    elif buf.startswith(_PNG_MAGIC):
        pixels = _read_png(path)
    elif buf[:2] in (b"P6", b"P3", b"P2", b"P1", b"P4"):
        raise ImageError(f"{path}: only binary grayscale PGM (P5) is supported")
    else:
        raise ImageError(f"{path}: unsupported image format")
    try:
        return as_field(pixels / 255.0, name=str(path))
    except ValueError as exc:
        raise ImageError(str(exc)) from exc


def _to_bytes(field):
    # round half up, e.g. 0.5 -> 127.5 -> 128
    scaled = np.floor(np.clip(field, 0.0, 1.0) * 255.0 + 0.5)
    return scaled.astype(np.uint8)


def _write_pgm(pixels, path):
    h, w = pixels.shape
    path = Path(path)
    try:
        with open(path, "wb") as fh:
            fh.write(b"P5\n%d %d\n255\n" % (w, h))
            fh.write(np.ascontiguousarray(pixels).tobytes())
    except OSError as exc:
        raise ImageError(f"{path}: cannot write ({exc.strerror})") from exc


def save_image(field, path):
    """Write ``field`` as an 8-bit PGM, clamping to ``[0, 1]`` first."""
    _write_pgm(_to_bytes(as_field(field)), path)


def save_mask(mask, path):
    """Write a boolean mask as a 0/255 PGM."""
    mask = np.asarray(mask, dtype=bool)
    _write_pgm(np.where(mask, 255, 0).astype(np.uint8), path)


def mask_from_phi(phi):
    """Inside region of a level set: ``phi >= 0`` (the zero level counts as inside)."""
    return np.asarray(phi) >= 0


def mask_boundary(mask):
    """Pixels of ``mask`` that have at least one 4-neighbor outside it.

    Neighbors beyond the image edge are treated as copies of the edge pixel.
    """
    m = np.pad(np.asarray(mask, dtype=bool), 1, mode="edge")
    core = m[1:-1, 1:-1]
    all_in = m[:-2, 1:-1] & m[2:, 1:-1] & m[1:-1, :-2] & m[1:-1, 2:]
    return core & ~all_in
