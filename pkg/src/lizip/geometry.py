"""Point cloud containers and the grid quantization transforms.

The codec is exact in the integer domain: once a cloud is snapped to a
uniform grid, every later stage is lossless, so the only reconstruction
error is the snapping distance itself, bounded by half a grid step per
axis.  Rounding is half-away-from-zero so the bound is symmetric around
the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RangeError, ValidationError

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1

# Intensity occupies 16 bits with 8 fractional bits, so raw values up to
# 65535/256 survive unclipped.
INTENSITY_SCALE = 256.0


@dataclass
class PointCloud:
    """Ordered 3D points in meters with optional per-point intensity."""

    points: np.ndarray
    intensity: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError(f"points must have shape (n, 3), got {pts.shape}")
        self.points = pts
        if self.intensity is not None:
            values = np.asarray(self.intensity, dtype=np.float64).reshape(-1)
            if values.shape[0] != pts.shape[0]:
                raise ValidationError(
                    f"intensity count {values.shape[0]} does not match "
                    f"point count {pts.shape[0]}"
                )
            self.intensity = values

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass
class QuantizedCloud:
    """Integer grid coordinates plus the scale that defines the grid.

    ``scale`` is the number of grid lines per meter, so a coordinate c
    represents the metric value c / scale.
    """

    coords: np.ndarray
    scale: float
    intensity: Optional[np.ndarray] = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.int32)
        if coords.ndim != 2 or coords.shape[1] != 3:
            raise ValidationError(f"coords must have shape (n, 3), got {coords.shape}")
        self.coords = coords
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"scale must be a positive finite number, got {self.scale}")
        self.scale = float(self.scale)
        if self.intensity is not None:
            values = np.asarray(self.intensity, dtype=np.uint16).reshape(-1)
            if values.shape[0] != coords.shape[0]:
                raise ValidationError(
                    f"intensity count {values.shape[0]} does not match "
                    f"point count {coords.shape[0]}"
                )
            self.intensity = values

    def __len__(self) -> int:
        return self.coords.shape[0]


def _round_half_away(values: np.ndarray) -> np.ndarray:
    """Round to the nearest integer, ties away from zero, as float64."""
    return np.copysign(np.floor(np.abs(values) + 0.5), values)


def quantize(cloud: PointCloud, scale: float) -> QuantizedCloud:
    """Snap a cloud to the integer grid defined by ``scale`` lines per meter.

    Raises ValidationError for non-finite inputs or a bad scale, and
    RangeError when a scaled coordinate falls outside signed 32-bit range.
    """
    if not (isinstance(scale, (int, float)) and math.isfinite(scale) and scale > 0):
        raise ValidationError(f"scale must be a positive finite number, got {scale!r}")
    pts = cloud.points
    finite = np.isfinite(pts)
    if not finite.all():
        bad = int(np.argwhere(~finite.all(axis=1))[0, 0])
        raise ValidationError(f"point {bad} has a non-finite coordinate")

    grid = _round_half_away(pts * float(scale))
    over = (grid < INT32_MIN) | (grid > INT32_MAX)
    if over.any():
        bad = int(np.argwhere(over.any(axis=1))[0, 0])
        raise RangeError(
            f"point {bad} overflows signed 32-bit grid coordinates at scale {scale}"
        )
    coords = grid.astype(np.int32)

    intensity = None
    if cloud.intensity is not None:
        raw = cloud.intensity
        if not np.isfinite(raw).all():
            bad = int(np.argmin(np.isfinite(raw)))
            raise ValidationError(f"intensity {bad} is non-finite")
        scaled = _round_half_away(raw * INTENSITY_SCALE)
        if (scaled < 0).any() or (scaled > 65535).any():
            bad = int(np.argmax((scaled < 0) | (scaled > 65535)))
            raise ValidationError(
                f"intensity {bad} falls outside the 16-bit fixed-point range"
            )
        intensity = scaled.astype(np.uint16)

    return QuantizedCloud(coords=coords, scale=float(scale), intensity=intensity)


def dequantize(qcloud: QuantizedCloud) -> PointCloud:
    """Map grid coordinates back to meters (the centers of their grid cells)."""
    pts = qcloud.coords.astype(np.float64) / qcloud.scale
    intensity = None
    if qcloud.intensity is not None:
        intensity = qcloud.intensity.astype(np.float64) / INTENSITY_SCALE
    return PointCloud(points=pts, intensity=intensity)


def max_reconstruction_error(original: PointCloud, decoded: PointCloud) -> float:
    """Largest per-axis absolute difference between two aligned clouds, in mm.

    Both clouds must list the same points in the same order.
    """
    if len(original) != len(decoded):
        raise ValidationError(
            f"cloud sizes differ: {len(original)} vs {len(decoded)}"
        )
    if len(original) == 0:
        return 0.0
    return float(np.max(np.abs(original.points - decoded.points)) * 1000.0)
