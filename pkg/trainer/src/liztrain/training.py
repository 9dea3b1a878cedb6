"""The training loop: seeded, chunked, and allergic to non-finite loss.

The dataset is shuffled once with the config seed, split into
``chunk_count`` shards, and the single network is trained through the
shards in sequence.  Each shard keeps its own train/validation split and
runs ``epochs_per_chunk`` epochs of minibatch Adam on mean squared
error, logging the shard's validation MSE after every epoch.

Determinism: the torch RNG seeds the weight init, a numpy generator
drives every shuffle, and all math is float32 on CPU, so the same config
and dataset reproduce the same final weights.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import torch
from torch import nn

from .config import TrainingConfig
from .errors import DivergenceError, ValidationError
from .model import build_mlp, layer_arrays

log = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    """Validation MSE after one epoch of one chunk."""

    chunk: int
    epoch: int
    val_mse: float


@dataclass
class TrainingResult:
    """Final weights plus the per-epoch validation trace."""

    layers: List[Tuple[np.ndarray, np.ndarray]]
    history: List[EpochRecord] = field(default_factory=list)

    @property
    def final_val_mse(self) -> float:
        if not self.history:
            raise ValidationError("training produced no epochs")
        return self.history[-1].val_mse


def _check_finite(value: float, what: str, chunk: int, epoch: int) -> None:
    if not math.isfinite(value):
        raise DivergenceError(
            f"{what} became {value} in chunk {chunk} epoch {epoch}; "
            f"training aborted (try a lower learning rate or cleaner data)"
        )


def train(config: TrainingConfig, dataset: Tuple[np.ndarray, np.ndarray]) -> TrainingResult:
    """Train a fresh network on (contexts, targets) per the config recipe."""
    contexts = np.ascontiguousarray(dataset[0], dtype=np.float32)
    targets = np.ascontiguousarray(dataset[1], dtype=np.float32)
    if contexts.ndim != 2 or contexts.shape[1] != 3 * config.context_size:
        raise ValidationError(
            f"contexts must have shape (m, {3 * config.context_size}), "
            f"got {contexts.shape}"
        )
    if targets.shape != (contexts.shape[0], 3):
        raise ValidationError(
            f"targets must have shape ({contexts.shape[0]}, 3), got {targets.shape}"
        )
    m = contexts.shape[0]
    if m < 2 * config.chunk_count:
        raise ValidationError(
            f"{m} examples cannot fill {config.chunk_count} chunks with a "
            f"train and a validation sample each"
        )

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    model = build_mlp(config)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.MSELoss()

    shards = np.array_split(rng.permutation(m), config.chunk_count)
    history: List[EpochRecord] = []
    for chunk_index, shard in enumerate(shards):
        val_count = max(1, int(round(config.val_ratio * len(shard))))
        if val_count >= len(shard):
            val_count = len(shard) - 1
        train_idx = shard[:-val_count]
        val_idx = shard[-val_count:]
        x_val = torch.from_numpy(contexts[val_idx])
        y_val = torch.from_numpy(targets[val_idx])
        for epoch in range(config.epochs_per_chunk):
            model.train()
            order = rng.permutation(len(train_idx))
            for start in range(0, len(order), config.batch_size):
                rows = train_idx[order[start : start + config.batch_size]]
                x = torch.from_numpy(contexts[rows])
                y = torch.from_numpy(targets[rows])
                optimizer.zero_grad()
                loss = loss_fn(model(x), y)
                value = float(loss.item())
                _check_finite(value, "training loss", chunk_index, epoch)
                loss.backward()
                optimizer.step()
            model.eval()
            with torch.no_grad():
                val_mse = float(loss_fn(model(x_val), y_val).item())
            _check_finite(val_mse, "validation MSE", chunk_index, epoch)
            log.info(
                "chunk %d/%d epoch %d/%d val_mse %.6g",
                chunk_index + 1, len(shards), epoch + 1,
                config.epochs_per_chunk, val_mse,
            )
            history.append(EpochRecord(chunk=chunk_index, epoch=epoch, val_mse=val_mse))

    return TrainingResult(layers=layer_arrays(model), history=history)
