"""Serialization of trained weights to the codec's LIZM layout.

The file is little-endian throughout: magic "LIZM", version, context
size, layer count, then an (in_dim, out_dim) pair per layer, then each
layer's row-major float32 weight matrix followed by its bias vector.
The codec memory-maps nothing and tolerates nothing extra, so the
writer validates the dimension chain before emitting a byte: the first
layer must accept 3k inputs, each layer must consume what the previous
one produced, and the last must emit exactly 3 values.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ValidationError

LIZM_MAGIC = b"LIZM"
LIZM_VERSION = 1

_HEADER = struct.Struct("<4sIII")


def _validated(
    layers: Sequence[Tuple[np.ndarray, np.ndarray]], context_size: int
) -> List[Tuple[np.ndarray, np.ndarray]]:
    if not (isinstance(context_size, int) and context_size >= 1):
        raise ValidationError(f"context size must be an int >= 1, got {context_size!r}")
    if not layers:
        raise ValidationError("cannot export a network with no layers")
    expected_in = 3 * context_size
    cleaned = []
    for index, (weight, bias) in enumerate(layers):
        w = np.ascontiguousarray(weight, dtype="<f4")
        b = np.ascontiguousarray(bias, dtype="<f4")
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
        raise ValidationError(f"final layer must emit 3 values, got {expected_in}")
    return cleaned


def lizm_bytes(
    layers: Sequence[Tuple[np.ndarray, np.ndarray]], context_size: int
) -> bytes:
    """The exact weight-file bytes for a validated layer stack."""
    cleaned = _validated(layers, context_size)
    parts = [_HEADER.pack(LIZM_MAGIC, LIZM_VERSION, context_size, len(cleaned))]
    for w, _ in cleaned:
        out_dim, in_dim = w.shape
        parts.append(struct.pack("<II", in_dim, out_dim))
    for w, b in cleaned:
        parts.append(w.tobytes())
        parts.append(b.tobytes())
    return b"".join(parts)


def export_lizm(
    layers: Sequence[Tuple[np.ndarray, np.ndarray]], context_size: int, path
) -> int:
    """Write a weight file and return the byte count on disk."""
    blob = lizm_bytes(layers, context_size)
    Path(path).write_bytes(blob)
    return len(blob)


def lizm_size(context_size: int, hidden_dim: int, hidden_layers: int) -> int:
    """Exported file size in bytes for an architecture, without training it."""
    dims = [3 * context_size] + [hidden_dim] * hidden_layers + [3]
    params = sum(dims[i] * dims[i + 1] + dims[i + 1] for i in range(len(dims) - 1))
    return _HEADER.size + 8 * (len(dims) - 1) + 4 * params
