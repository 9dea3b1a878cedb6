"""Block residual coding and the byte-plane transform.

A block stores its first k points verbatim (the anchors) and every later
point as the integer difference from its prediction.  Decoding replays
the same predictor over the growing reconstruction, so as long as both
sides compute identical predictions the residuals cancel exactly and the
block round-trips bit for bit.

Before entropy coding, the int32 stream is split into four byte planes
(all least-significant bytes first, up through the sign bytes).  Small
residuals leave the upper planes almost constant, which is where the
general-purpose backends recover most of their ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CorruptionError, RangeError, ValidationError
from .geometry import INT32_MAX, INT32_MIN
from .predictor import (
    KIND_MLP,
    PredictorModel,
    _pack,
    _predict_linear,
    _predict_mlp,
)


@dataclass
class ResidualBlock:
    """Anchors, residuals, and the shape data needed to invert them."""

    anchors: np.ndarray
    residuals: np.ndarray
    point_count: int
    context_size: int

    def __post_init__(self):
        self.anchors = np.asarray(self.anchors, dtype=np.int32).reshape(-1, 3)
        self.residuals = np.asarray(self.residuals, dtype=np.int32).reshape(-1, 3)


@njit(cache=True)
def _encode_mlp_block(points, k, scale, dims, wofs, bofs, flat, residuals):
    n = points.shape[0]
    width = 0
    for i in range(dims.shape[0]):
        if dims[i] > width:
            width = dims[i]
    x = np.empty(dims[0], dtype=np.float32)
    a = np.empty(width, dtype=np.float32)
    b = np.empty(width, dtype=np.float32)
    pred = np.zeros(3, dtype=np.int64)
    for t in range(k, n):
        ok = _predict_mlp(points, t, k, scale, dims, wofs, bofs, flat, x, a, b, pred)
        if not ok:
            return False
        for axis in range(3):
            residuals[t - k, axis] = points[t, axis] - pred[axis]
    return True


@njit(cache=True)
def _decode_mlp_block(points, k, scale, dims, wofs, bofs, flat, residuals):
    n = points.shape[0]
    width = 0
    for i in range(dims.shape[0]):
        if dims[i] > width:
            width = dims[i]
    x = np.empty(dims[0], dtype=np.float32)
    a = np.empty(width, dtype=np.float32)
    b = np.empty(width, dtype=np.float32)
    pred = np.zeros(3, dtype=np.int64)
    for t in range(k, n):
        ok = _predict_mlp(points, t, k, scale, dims, wofs, bofs, flat, x, a, b, pred)
        if not ok:
            return False
        for axis in range(3):
            points[t, axis] = pred[axis] + residuals[t - k, axis]
    return True


@njit(cache=True)
def _decode_linear_block(points, k, residuals):
    n = points.shape[0]
    pred = np.zeros(3, dtype=np.int64)
    for t in range(k, n):
        _predict_linear(points, t, pred)
        for axis in range(3):
            points[t, axis] = pred[axis] + residuals[t - k, axis]


def encode_block(points: np.ndarray, model: PredictorModel, scale: float) -> ResidualBlock:
    """Turn one Morton-ordered run of integer points into anchors + residuals."""
    pts = np.ascontiguousarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError(f"points must have shape (n, 3), got {pts.shape}")
    n = pts.shape[0]
    k = model.context_size
    anchors = pts[: min(n, k)]
    if n <= k:
        return ResidualBlock(
            anchors=anchors.astype(np.int32),
            residuals=np.empty((0, 3), dtype=np.int32),
            point_count=n,
            context_size=k,
        )

    if model.kind == KIND_MLP:
        residuals = np.empty((n - k, 3), dtype=np.int64)
        dims, wofs, bofs, flat = _pack(model)
        ok = _encode_mlp_block(pts, k, float(scale), dims, wofs, bofs, flat, residuals)
        if not ok:
            raise CorruptionError("predictor produced a non-finite output")
    else:
        # Pure integer arithmetic, so the vectorized form is exact.
        predictions = 2 * pts[k - 1 : n - 1] - pts[k - 2 : n - 2]
        residuals = pts[k:] - predictions

    if residuals.size and (
        int(residuals.min()) < INT32_MIN or int(residuals.max()) > INT32_MAX
    ):
        raise RangeError(
            "a residual does not fit in 32 bits; the input is not a "
            "Morton-windowed coordinate stream"
        )
    return ResidualBlock(
        anchors=anchors.astype(np.int32),
        residuals=residuals.astype(np.int32),
        point_count=n,
        context_size=k,
    )


def decode_block(block: ResidualBlock, model: PredictorModel, scale: float) -> np.ndarray:
    """Reconstruct the integer points of one block, exactly."""
    n = block.point_count
    k = model.context_size
    if k != block.context_size:
        raise ValidationError(
            f"model context size {k} does not match block context size {block.context_size}"
        )
    if block.anchors.shape[0] != min(n, k):
        raise CorruptionError(
            f"block holds {block.anchors.shape[0]} anchors, expected {min(n, k)}"
        )
    expected = max(0, n - k)
    if block.residuals.shape[0] != expected:
        raise CorruptionError(
            f"block holds {block.residuals.shape[0]} residuals, expected {expected}"
        )

    points = np.empty((n, 3), dtype=np.int64)
    points[: min(n, k)] = block.anchors.astype(np.int64)
    if n > k:
        residuals = block.residuals.astype(np.int64)
        if model.kind == KIND_MLP:
            dims, wofs, bofs, flat = _pack(model)
            ok = _decode_mlp_block(points, k, float(scale), dims, wofs, bofs, flat, residuals)
            if not ok:
                raise CorruptionError("predictor produced a non-finite output")
        else:
            _decode_linear_block(points, k, residuals)

    if points.size and (int(points.min()) < INT32_MIN or int(points.max()) > INT32_MAX):
        raise CorruptionError("decoded coordinates overflow 32 bits; residual data is damaged")
    return points.astype(np.int32)


# --- plaintext layout and the byte-plane transform ------------------------


def serialize_block(block: ResidualBlock) -> np.ndarray:
    """Flatten a block to one int32 vector: anchors interleaved, residuals planar.

    Anchors keep x,y,z together per point; residuals are regrouped into
    all-x, all-y, all-z runs so same-axis statistics sit contiguously.
    """
    return np.concatenate(
        [block.anchors.ravel(), block.residuals.T.ravel()]
    ).astype(np.int32)


def deserialize_block(
    values: np.ndarray, point_count: int, context_size: int
) -> ResidualBlock:
    """Invert serialize_block given the block's recorded shape."""
    flat = np.asarray(values, dtype=np.int32).reshape(-1)
    n = point_count
    k = context_size
    anchor_count = min(n, k)
    residual_count = max(0, n - k)
    expected = 3 * anchor_count + 3 * residual_count
    if flat.shape[0] != expected:
        raise CorruptionError(
            f"block payload holds {flat.shape[0]} values, expected {expected} "
            f"for {n} points with context {k}"
        )
    anchors = flat[: 3 * anchor_count].reshape(anchor_count, 3)
    residuals = flat[3 * anchor_count :].reshape(3, residual_count).T
    return ResidualBlock(
        anchors=anchors,
        residuals=residuals,
        point_count=n,
        context_size=k,
    )


def byte_shuffle(values: np.ndarray) -> bytes:
    """Regroup int32 little-endian bytes into four planes, low bytes first."""
    arr = np.asarray(values, dtype=np.int64).reshape(-1)
    if arr.size and (int(arr.min()) < INT32_MIN or int(arr.max()) > INT32_MAX):
        raise ValidationError("byte_shuffle input does not fit in 32 bits")
    planes = arr.astype("<i4").view(np.uint8).reshape(-1, 4)
    return planes.T.tobytes()


def byte_unshuffle(data: bytes) -> np.ndarray:
    """Invert byte_shuffle back to an int32 vector."""
    if len(data) % 4 != 0:
        raise CorruptionError(
            f"byte-plane data length {len(data)} is not a multiple of 4"
        )
    count = len(data) // 4
    planes = np.frombuffer(data, dtype=np.uint8).reshape(4, count)
    return (
        np.ascontiguousarray(planes.T).view("<i4").reshape(count).astype(np.int32)
    )
