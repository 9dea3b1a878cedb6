"""From frames to (context, target offset) training pairs.

Each frame is quantized and Morton-sorted exactly as the codec does it,
then every position t >= k yields one example:

* context: the k previous grid points, expressed relative to the last
  one and divided by scale, so the network sees metric offsets.  Oldest
  point first, float32, identical to what the codec feeds its predictor.
* target: the metric offset from the last context point to the actual
  next point, again grid difference over scale.

Predicting offsets instead of absolute positions is what makes one
trained network work anywhere in space: the examples are translation
invariant by construction.
"""

from __future__ import annotations

import math
import warnings
from typing import Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .frames import FrameSource, read_points
from .grid import grid_sort


def frame_pairs(points: np.ndarray, k: int, scale: float) -> Tuple[np.ndarray, np.ndarray]:
    """Context and target arrays for one frame's metric coordinates.

    Returns (contexts, targets) with shapes (n - k, 3k) and (n - k, 3)
    in float32.  The frame must have at least k + 1 points.
    """
    coords = grid_sort(points, scale).astype(np.int64)
    n = len(coords)
    if n < k + 1:
        raise ValidationError(f"frame has {n} points; contexts need at least {k + 1}")
    anchors = coords[k - 1 : n - 1]
    contexts = np.empty((n - k, 3 * k), dtype=np.float32)
    for j in range(k):
        window = coords[j : n - k + j]
        contexts[:, 3 * j : 3 * j + 3] = ((window - anchors) / scale).astype(np.float32)
    targets = ((coords[k:] - anchors) / scale).astype(np.float32)
    return contexts, targets


def build_training_set(
    frames: Sequence, k: int, scale: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Concatenated training pairs for a corpus of frames.

    ``frames`` may hold FrameSource entries or in-memory (n, 3) arrays,
    mixed freely.  Frames with fewer than k + 1 points cannot produce a
    single context and are skipped with a warning rather than failing
    the whole corpus.
    """
    if not (isinstance(k, int) and k >= 1):
        raise ValidationError(f"context size must be an int >= 1, got {k!r}")
    if not (isinstance(scale, (int, float)) and math.isfinite(scale) and scale > 0):
        raise ValidationError(f"scale must be a positive finite number, got {scale!r}")
    context_blocks = []
    target_blocks = []
    for index, frame in enumerate(frames):
        if isinstance(frame, FrameSource):
            points = read_points(frame)
            label = str(frame.path)
        else:
            points = np.asarray(frame, dtype=np.float64)
            label = f"frame {index}"
        if len(points) < k + 1:
            warnings.warn(
                f"skipping {label}: {len(points)} points cannot fill a "
                f"context of {k} plus a target",
                stacklevel=2,
            )
            continue
        contexts, targets = frame_pairs(points, k, float(scale))
        context_blocks.append(contexts)
        target_blocks.append(targets)
    if not context_blocks:
        return (
            np.empty((0, 3 * k), dtype=np.float32),
            np.empty((0, 3), dtype=np.float32),
        )
    return np.concatenate(context_blocks), np.concatenate(target_blocks)
