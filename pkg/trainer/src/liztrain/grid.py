"""Grid quantization and Morton ordering, matching the codec bit for bit.

The trainer never imports the codec.  It still has to see the exact
integer streams the codec will predict over, because a weight file is
only as good as the agreement between training contexts and encode-time
contexts.  So the two transforms that define those streams are
reproduced here with the same arithmetic:

* snap to grid: multiply by scale in float64, round half away from zero,
  check the signed 32-bit range;
* Morton order: subtract the per-axis minimum, spread 21 bits per axis
  with the parallel-prefix masks, interleave x,y,z from the low bit, and
  stable-sort by code.

A parity test in the suite pins this module against the codec's own
output on random clouds.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1

MAX_AXIS_BITS = 21
AXIS_LIMIT = 1 << MAX_AXIS_BITS

_M0 = 0x1F00000000FFFF
_M1 = 0x1F0000FF0000FF
_M2 = 0x100F00F00F00F00F
_M3 = 0x10C30C30C30C30C3
_M4 = 0x1249249249249249


def quantize_points(points: np.ndarray, scale: float) -> np.ndarray:
    """Snap an (n, 3) float array to the integer grid, ties away from zero.

    Returns int32 grid coordinates.  Raises ValidationError for a bad
    scale, non-finite coordinates, or values outside signed 32-bit range.
    """
    if not (isinstance(scale, (int, float)) and math.isfinite(scale) and scale > 0):
        raise ValidationError(f"scale must be a positive finite number, got {scale!r}")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError(f"points must have shape (n, 3), got {pts.shape}")
    finite = np.isfinite(pts)
    if not finite.all():
        bad = int(np.argwhere(~finite.all(axis=1))[0, 0])
        raise ValidationError(f"point {bad} has a non-finite coordinate")
    product = pts * float(scale)
    grid = np.copysign(np.floor(np.abs(product) + 0.5), product)
    over = (grid < INT32_MIN) | (grid > INT32_MAX)
    if over.any():
        bad = int(np.argwhere(over.any(axis=1))[0, 0])
        raise ValidationError(
            f"point {bad} overflows signed 32-bit grid coordinates at scale {scale}"
        )
    return grid.astype(np.int32)


def _spread_u64(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.uint64)
    v = (v | (v << 32)) & np.uint64(_M0)
    v = (v | (v << 16)) & np.uint64(_M1)
    v = (v | (v << 8)) & np.uint64(_M2)
    v = (v | (v << 4)) & np.uint64(_M3)
    v = (v | (v << 2)) & np.uint64(_M4)
    return v


def morton_perm(coords: np.ndarray) -> np.ndarray:
    """The stable permutation that sorts integer coordinates in Z-order.

    The per-axis minimum is subtracted first, so any cloud whose extent
    fits the 21-bit window qualifies regardless of absolute position.
    """
    work = np.asarray(coords, dtype=np.int64)
    if work.ndim != 2 or work.shape[1] != 3:
        raise ValidationError(f"coords must have shape (n, 3), got {work.shape}")
    if len(work) == 0:
        return np.empty(0, dtype=np.int64)
    shifted = work - work.min(axis=0)
    if int(shifted.max()) >= AXIS_LIMIT:
        spans = shifted.max(axis=0)
        raise ValidationError(
            f"coordinates span more than {MAX_AXIS_BITS} bits per axis "
            f"(extents {spans})"
        )
    codes = _spread_u64(shifted[:, 0])
    codes |= _spread_u64(shifted[:, 1]) << np.uint64(1)
    codes |= _spread_u64(shifted[:, 2]) << np.uint64(2)
    return np.argsort(codes, kind="stable")


def grid_sort(points: np.ndarray, scale: float) -> np.ndarray:
    """Quantize a metric cloud and return its coordinates in Morton order."""
    coords = quantize_points(points, scale)
    return coords[morton_perm(coords)]
