"""Training hyperparameters and the config file that carries them.

A config file is a flat JSON object whose keys are TrainingConfig field
names.  Absent fields keep their defaults; unknown fields are rejected
so a typo cannot silently train the wrong model.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError, ValidationError

LOSS_MSE = "mse"


@dataclass
class TrainingConfig:
    """Everything that determines a training run besides the data itself.

    ``chunk_count`` shards the dataset into that many pieces trained in
    sequence; each shard gets its own train/validation split and
    ``epochs_per_chunk`` epochs.  One chunk means plain whole-dataset
    training.
    """

    context_size: int = 3
    hidden_dim: int = 256
    hidden_layers: int = 3
    learning_rate: float = 1e-3
    epochs_per_chunk: int = 50
    train_ratio: float = 0.8
    val_ratio: float = 0.2
    loss: str = LOSS_MSE
    seed: int = 0
    chunk_count: int = 1
    batch_size: int = 256

    def __post_init__(self):
        if not (isinstance(self.context_size, int) and self.context_size >= 1):
            raise ValidationError(f"context_size must be an int >= 1, got {self.context_size!r}")
        if not (isinstance(self.hidden_dim, int) and self.hidden_dim >= 1):
            raise ValidationError(f"hidden_dim must be an int >= 1, got {self.hidden_dim!r}")
        if not (isinstance(self.hidden_layers, int) and self.hidden_layers >= 1):
            raise ValidationError(f"hidden_layers must be an int >= 1, got {self.hidden_layers!r}")
        if not (isinstance(self.learning_rate, (int, float))
                and math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValidationError(f"learning_rate must be positive and finite, got {self.learning_rate!r}")
        if not (isinstance(self.epochs_per_chunk, int) and self.epochs_per_chunk >= 1):
            raise ValidationError(f"epochs_per_chunk must be an int >= 1, got {self.epochs_per_chunk!r}")
        for name in ("train_ratio", "val_ratio"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and 0.0 < value < 1.0):
                raise ValidationError(f"{name} must lie strictly between 0 and 1, got {value!r}")
        if abs(self.train_ratio + self.val_ratio - 1.0) > 1e-9:
            raise ValidationError(
                f"train_ratio + val_ratio must equal 1, got "
                f"{self.train_ratio} + {self.val_ratio}"
            )
        if self.loss != LOSS_MSE:
            raise ValidationError(f"unsupported loss {self.loss!r}; only {LOSS_MSE!r} is available")
        if not isinstance(self.seed, int):
            raise ValidationError(f"seed must be an int, got {self.seed!r}")
        if not (isinstance(self.chunk_count, int) and self.chunk_count >= 1):
            raise ValidationError(f"chunk_count must be an int >= 1, got {self.chunk_count!r}")
        if not (isinstance(self.batch_size, int) and self.batch_size >= 1):
            raise ValidationError(f"batch_size must be an int >= 1, got {self.batch_size!r}")
        self.learning_rate = float(self.learning_rate)
        self.train_ratio = float(self.train_ratio)
        self.val_ratio = float(self.val_ratio)


_FIELD_NAMES = tuple(field.name for field in dataclasses.fields(TrainingConfig))


def load_config(path) -> TrainingConfig:
    """Read a TrainingConfig from a JSON file of field/value pairs."""
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise FormatError(f"{path}: config must be a JSON object, got {type(raw).__name__}")
    unknown = sorted(set(raw) - set(_FIELD_NAMES))
    if unknown:
        raise ValidationError(f"{path}: unknown config fields: {', '.join(unknown)}")
    return TrainingConfig(**raw)


def save_config(config: TrainingConfig, path) -> None:
    """Write a config as JSON with one field per line."""
    Path(path).write_text(json.dumps(dataclasses.asdict(config), indent=2) + "\n")
