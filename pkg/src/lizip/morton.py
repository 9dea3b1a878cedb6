"""64-bit Morton (Z-order) codes and the spatial sorting permutation.

Each axis contributes 21 bits, interleaved x,y,z from the least
significant position, so the full code fits in 63 bits.  Sorting by code
walks the cloud along a space-filling curve, which places spatial
neighbors near each other in the stream and is what makes short
prediction contexts work.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .errors import RangeError
from .geometry import QuantizedCloud

MAX_AXIS_BITS = 21
AXIS_LIMIT = 1 << MAX_AXIS_BITS

# Parallel-prefix bit spreading: each step doubles the gap between
# occupied bit groups, the mask keeps only the target positions.
_M0 = 0x1F00000000FFFF
_M1 = 0x1F0000FF0000FF
_M2 = 0x100F00F00F00F00F
_M3 = 0x10C30C30C30C30C3
_M4 = 0x1249249249249249


def spread_bits(value: int) -> int:
    """Spread the low 21 bits of ``value`` so consecutive bits land 3 apart."""
    if value < 0 or value >= AXIS_LIMIT:
        raise RangeError(f"axis value {value} outside [0, 2^{MAX_AXIS_BITS})")
    v = value
    v = (v | (v << 32)) & _M0
    v = (v | (v << 16)) & _M1
    v = (v | (v << 8)) & _M2
    v = (v | (v << 4)) & _M3
    v = (v | (v << 2)) & _M4
    return v


def morton_encode(point, offset=(0, 0, 0)) -> int:
    """Interleave one integer point (minus ``offset``) into a Morton code."""
    code = 0
    for axis in range(3):
        shifted = int(point[axis]) - int(offset[axis])
        if shifted < 0 or shifted >= AXIS_LIMIT:
            raise RangeError(
                f"axis {axis} value {point[axis]} with offset {offset[axis]} "
                f"outside [0, 2^{MAX_AXIS_BITS})"
            )
        code |= spread_bits(shifted) << axis
    return code


def _spread_u64(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.uint64)
    v = (v | (v << 32)) & np.uint64(_M0)
    v = (v | (v << 16)) & np.uint64(_M1)
    v = (v | (v << 8)) & np.uint64(_M2)
    v = (v | (v << 4)) & np.uint64(_M3)
    v = (v | (v << 2)) & np.uint64(_M4)
    return v


def morton_codes(coords: np.ndarray, offset) -> np.ndarray:
    """Vectorized Morton codes for an (n, 3) integer array.

    ``offset`` is subtracted per axis first; every shifted value must fit
    in the 21-bit axis window.
    """
    shifted = coords.astype(np.int64) - np.asarray(offset, dtype=np.int64)
    if shifted.size and (int(shifted.min()) < 0 or int(shifted.max()) >= AXIS_LIMIT):
        spans = shifted.max(axis=0) - shifted.min(axis=0) if len(shifted) else None
        raise RangeError(
            f"coordinates span more than {MAX_AXIS_BITS} bits per axis "
            f"after offsetting (extents {spans})"
        )
    codes = _spread_u64(shifted[:, 0])
    codes |= _spread_u64(shifted[:, 1]) << np.uint64(1)
    codes |= _spread_u64(shifted[:, 2]) << np.uint64(2)
    return codes


def morton_sort(qcloud: QuantizedCloud) -> Tuple[QuantizedCloud, np.ndarray]:
    """Sort a quantized cloud into Morton order.

    The per-axis minimum is subtracted before encoding, which admits any
    cloud whose extent fits the 21-bit window regardless of where it sits
    in the signed 32-bit coordinate space.  Returns the sorted cloud and
    the permutation that produced it; the sort is stable, so equal codes
    keep their input order.
    """
    n = len(qcloud)
    if n == 0:
        return (
            QuantizedCloud(
                coords=qcloud.coords.copy(),
                scale=qcloud.scale,
                intensity=None if qcloud.intensity is None else qcloud.intensity.copy(),
            ),
            np.empty(0, dtype=np.int64),
        )
    coords = qcloud.coords.astype(np.int64)
    mins = coords.min(axis=0)
    codes = morton_codes(coords, mins)
    perm = np.argsort(codes, kind="stable")
    intensity = None if qcloud.intensity is None else qcloud.intensity[perm]
    return (
        QuantizedCloud(coords=qcloud.coords[perm], scale=qcloud.scale, intensity=intensity),
        perm,
    )
