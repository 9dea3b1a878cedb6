"""Next-point prediction over Morton-ordered integer streams.

Two interchangeable predictors share one calling convention:

* ``linear``: integer extrapolation 2*P[t-1] - P[t-2].  Exact integer
  arithmetic, needs no weights, always available.
* ``mlp``: a small ReLU network over the last k points, expressed
  relative to P[t-1] in meters.  Inference runs in strict float32 with a
  fixed sequential accumulation order, compiled once with numba.  The
  encoder and decoder call the very same kernel, so both sides see
  bit-identical predictions on any hardware; that is the property the
  whole zero-drift design rests on.

Weight files use a small fixed little-endian layout (see docs/format.md):
magic "LIZM", version, context size, layer count, the (in, out) pair per
layer, then row-major float32 weights followed by the bias, layer by
layer.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numba import njit

from .errors import CorruptionError, FormatError, ValidationError
from .morton import AXIS_LIMIT

LIZM_MAGIC = b"LIZM"
LIZM_VERSION = 1

KIND_LINEAR = "linear"
KIND_MLP = "mlp"

# Predicted offsets are clamped to one full axis window on each side so a
# residual always fits comfortably in 32 bits, no matter how wild an
# (untrained or damaged) network's output is.
_OFFSET_CLAMP = float(AXIS_LIMIT)

DEFAULT_CONTEXT_SIZE = 3
DEFAULT_HIDDEN_DIM = 256
DEFAULT_HIDDEN_LAYERS = 3


@dataclass
class PredictorModel:
    """A prediction scheme: either the linear fallback or MLP weights."""

    kind: str
    context_size: int
    layers: Optional[List[Tuple[np.ndarray, np.ndarray]]] = None

    def __post_init__(self):
        if self.kind not in (KIND_LINEAR, KIND_MLP):
            raise ValidationError(f"unknown predictor kind {self.kind!r}")
        if self.context_size < 1:
            raise ValidationError(f"context size must be >= 1, got {self.context_size}")
        if self.kind == KIND_LINEAR:
            if self.context_size < 2:
                raise ValidationError("linear predictor needs a context of at least 2")
            if self.layers is not None:
                raise ValidationError("linear predictor carries no weights")
            return
        if not self.layers:
            raise ValidationError("mlp predictor needs at least one layer")
        expected_in = 3 * self.context_size
        cleaned = []
        for index, (weight, bias) in enumerate(self.layers):
            w = np.ascontiguousarray(weight, dtype=np.float32)
            b = np.ascontiguousarray(bias, dtype=np.float32)
            if w.ndim != 2:
                raise ValidationError(f"layer {index} weight must be 2-D, got {w.ndim}-D")
            out_dim, in_dim = w.shape
            if in_dim != expected_in:
                raise ValidationError(
                    f"layer {index} expects {in_dim} inputs, previous layer "
                    f"provides {expected_in}"
                )
            if b.shape != (out_dim,):
                raise ValidationError(
                    f"layer {index} bias shape {b.shape} does not match {out_dim} outputs"
                )
            cleaned.append((w, b))
            expected_in = out_dim
        if expected_in != 3:
            raise ValidationError(
                f"final layer must emit 3 values, got {expected_in}"
            )
        self.layers = cleaned

    @property
    def parameter_count(self) -> int:
        if self.kind == KIND_LINEAR:
            return 0
        return sum(w.size + b.size for w, b in self.layers)


@dataclass
class PredictionContext:
    """The last k decoded points (rows, oldest first) and the grid scale."""

    previous: np.ndarray
    scale: float

    def __post_init__(self):
        prev = np.asarray(self.previous, dtype=np.int64)
        if prev.ndim != 2 or prev.shape[1] != 3:
            raise ValidationError(f"previous must have shape (k, 3), got {prev.shape}")
        if prev.shape[0] < 1:
            raise ValidationError("context needs at least one previous point")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"scale must be a positive finite number, got {self.scale}")
        self.previous = prev
        self.scale = float(self.scale)


def linear_model(context_size: int = 2) -> PredictorModel:
    """The weightless integer extrapolation fallback."""
    return PredictorModel(kind=KIND_LINEAR, context_size=context_size)


def mlp_model(layers: Sequence[Tuple[np.ndarray, np.ndarray]], context_size: int) -> PredictorModel:
    """Wrap explicit (weight, bias) float32 pairs as an MLP predictor."""
    return PredictorModel(kind=KIND_MLP, context_size=context_size, layers=list(layers))


# --- weight file serialization -------------------------------------------

_HEADER = struct.Struct("<4sIII")


def save_lizm(model: PredictorModel) -> bytes:
    """Serialize MLP weights to the LIZM byte layout."""
    if model.kind != KIND_MLP:
        raise ValidationError("only mlp predictors have a weight-file form")
    parts = [_HEADER.pack(LIZM_MAGIC, LIZM_VERSION, model.context_size, len(model.layers))]
    for w, _ in model.layers:
        out_dim, in_dim = w.shape
        parts.append(struct.pack("<II", in_dim, out_dim))
    for w, b in model.layers:
        parts.append(np.ascontiguousarray(w, dtype="<f4").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f4").tobytes())
    return b"".join(parts)


def load_lizm(data: bytes) -> PredictorModel:
    """Parse LIZM bytes back into an MLP predictor.

    Raises FormatError for a bad magic/version and CorruptionError when
    the dimension table and payload length disagree.
    """
    if len(data) < _HEADER.size:
        raise FormatError(f"weight data too short: {len(data)} bytes")
    magic, version, context_size, layer_count = _HEADER.unpack_from(data, 0)
    if magic != LIZM_MAGIC:
        raise FormatError(f"bad weight-file magic {magic!r}")
    if version != LIZM_VERSION:
        raise FormatError(f"unsupported weight-file version {version}")
    if context_size < 1:
        raise FormatError(f"bad context size {context_size}")
    if layer_count < 1:
        raise FormatError(f"bad layer count {layer_count}")

    cursor = _HEADER.size
    dims = []
    for index in range(layer_count):
        if cursor + 8 > len(data):
            raise CorruptionError("weight data truncated inside the dimension table")
        in_dim, out_dim = struct.unpack_from("<II", data, cursor)
        cursor += 8
        if in_dim < 1 or out_dim < 1:
            raise CorruptionError(f"layer {index} has zero dimension ({in_dim}x{out_dim})")
        dims.append((in_dim, out_dim))

    expected_in = 3 * context_size
    for index, (in_dim, out_dim) in enumerate(dims):
        if in_dim != expected_in:
            raise CorruptionError(
                f"layer {index} expects {in_dim} inputs, previous layer provides {expected_in}"
            )
        expected_in = out_dim
    if expected_in != 3:
        raise CorruptionError(f"final layer emits {expected_in} values, expected 3")

    layers = []
    for index, (in_dim, out_dim) in enumerate(dims):
        w_bytes = 4 * in_dim * out_dim
        b_bytes = 4 * out_dim
        if cursor + w_bytes + b_bytes > len(data):
            raise CorruptionError(f"weight data truncated inside layer {index}")
        w = np.frombuffer(data, dtype="<f4", count=in_dim * out_dim, offset=cursor)
        cursor += w_bytes
        b = np.frombuffer(data, dtype="<f4", count=out_dim, offset=cursor)
        cursor += b_bytes
        layers.append((w.reshape(out_dim, in_dim).astype(np.float32), b.astype(np.float32)))
    if cursor != len(data):
        raise CorruptionError(f"{len(data) - cursor} trailing bytes after the last layer")

    return PredictorModel(kind=KIND_MLP, context_size=context_size, layers=layers)


def read_lizm(path) -> PredictorModel:
    with open(path, "rb") as handle:
        return load_lizm(handle.read())


def write_lizm(model: PredictorModel, path) -> None:
    with open(path, "wb") as handle:
        handle.write(save_lizm(model))


# --- strict float32 inference --------------------------------------------
#
# The kernels below are the only MLP execution path in the package.  Every
# accumulation is an explicit scalar float32 loop: products are summed in
# index order, the bias is added last, so the result is a deterministic
# function of the weights and inputs with no dependence on BLAS, SIMD
# width, or threading.  fastmath stays off for the same reason.


def _pack(model: PredictorModel):
    """Flatten layers into (dims, weight offsets, bias offsets, parameters)."""
    shapes = [(w.shape[1], w.shape[0]) for w, _ in model.layers]
    dims = np.array([shapes[0][0]] + [s[1] for s in shapes], dtype=np.int64)
    wofs = np.zeros(len(shapes), dtype=np.int64)
    bofs = np.zeros(len(shapes), dtype=np.int64)
    cursor = 0
    for index, (in_dim, out_dim) in enumerate(shapes):
        wofs[index] = cursor
        cursor += in_dim * out_dim
        bofs[index] = cursor
        cursor += out_dim
    flat = np.empty(cursor, dtype=np.float32)
    for index, (w, b) in enumerate(model.layers):
        start = wofs[index]
        flat[start : start + w.size] = w.ravel()
        start = bofs[index]
        flat[start : start + b.size] = b
    return dims, wofs, bofs, flat


@njit(cache=True)
def _forward_f32(dims, wofs, bofs, flat, x, a, b):
    """Run the network on x, leaving the outputs in a[:dims[-1]]."""
    layer_count = dims.shape[0] - 1
    for m in range(dims[0]):
        a[m] = x[m]
    for layer in range(layer_count):
        in_dim = dims[layer]
        out_dim = dims[layer + 1]
        wbase = wofs[layer]
        bbase = bofs[layer]
        for j in range(out_dim):
            acc = np.float32(0.0)
            row = wbase + j * in_dim
            for m in range(in_dim):
                acc += flat[row + m] * a[m]
            acc += flat[bbase + j]
            if layer < layer_count - 1 and acc < np.float32(0.0):
                acc = np.float32(0.0)
            b[j] = acc
        a, b = b, a
    return a


@njit(cache=True)
def _fill_context(points, t, k, scale, x):
    """Write the k previous points, relative to P[t-1] in meters, into x."""
    px = points[t - 1, 0]
    py = points[t - 1, 1]
    pz = points[t - 1, 2]
    for j in range(k):
        row = t - k + j
        x[3 * j + 0] = np.float32((points[row, 0] - px) / scale)
        x[3 * j + 1] = np.float32((points[row, 1] - py) / scale)
        x[3 * j + 2] = np.float32((points[row, 2] - pz) / scale)


@njit(cache=True)
def _predict_mlp(points, t, k, scale, dims, wofs, bofs, flat, x, a, b, out):
    """Predict point t into out; False when the network output is non-finite."""
    _fill_context(points, t, k, scale, x)
    result = _forward_f32(dims, wofs, bofs, flat, x, a, b)
    for axis in range(3):
        value = float(result[axis])
        if not math.isfinite(value):
            return False
        grid = value * scale
        if grid > _OFFSET_CLAMP:
            grid = _OFFSET_CLAMP
        elif grid < -_OFFSET_CLAMP:
            grid = -_OFFSET_CLAMP
        if grid >= 0.0:
            rounded = np.int64(np.floor(grid + 0.5))
        else:
            rounded = -np.int64(np.floor(-grid + 0.5))
        out[axis] = points[t - 1, axis] + rounded
    return True


@njit(cache=True)
def _predict_linear(points, t, out):
    for axis in range(3):
        out[axis] = 2 * points[t - 1, axis] - points[t - 2, axis]


def predict(model: PredictorModel, ctx: PredictionContext) -> Tuple[int, int, int]:
    """Predict the next integer point from the last k decoded points."""
    k = model.context_size
    if ctx.previous.shape[0] != k:
        raise ValidationError(
            f"context holds {ctx.previous.shape[0]} points, model needs {k}"
        )
    points = np.ascontiguousarray(ctx.previous, dtype=np.int64)
    out = np.zeros(3, dtype=np.int64)
    if model.kind == KIND_LINEAR:
        _predict_linear(points, k, out)
        return int(out[0]), int(out[1]), int(out[2])
    dims, wofs, bofs, flat = _pack(model)
    width = int(dims.max())
    x = np.empty(int(dims[0]), dtype=np.float32)
    a = np.empty(width, dtype=np.float32)
    b = np.empty(width, dtype=np.float32)
    ok = _predict_mlp(points, k, k, ctx.scale, dims, wofs, bofs, flat, x, a, b, out)
    if not ok:
        raise CorruptionError("predictor produced a non-finite output")
    return int(out[0]), int(out[1]), int(out[2])


def predict_offset(model: PredictorModel, ctx: PredictionContext) -> np.ndarray:
    """Raw float32 network output (metric offsets from P[t-1]) before rounding."""
    if model.kind != KIND_MLP:
        raise ValidationError("raw offsets are only defined for mlp predictors")
    k = model.context_size
    if ctx.previous.shape[0] != k:
        raise ValidationError(
            f"context holds {ctx.previous.shape[0]} points, model needs {k}"
        )
    points = np.ascontiguousarray(ctx.previous, dtype=np.int64)
    dims, wofs, bofs, flat = _pack(model)
    width = int(dims.max())
    x = np.empty(int(dims[0]), dtype=np.float32)
    a = np.empty(width, dtype=np.float32)
    b = np.empty(width, dtype=np.float32)
    _fill_context(points, k, k, ctx.scale, x)
    result = _forward_f32(dims, wofs, bofs, flat, x, a, b)
    return np.array(result[:3], dtype=np.float32)


def build_context(previous: np.ndarray, scale: float) -> np.ndarray:
    """The float32 feature vector an MLP sees for a given history window."""
    ctx = PredictionContext(previous=previous, scale=scale)
    k = ctx.previous.shape[0]
    x = np.empty(3 * k, dtype=np.float32)
    _fill_context(np.ascontiguousarray(ctx.previous, dtype=np.int64), k, k, ctx.scale, x)
    return x
