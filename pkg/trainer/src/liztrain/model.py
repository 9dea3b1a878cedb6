"""The predictor network as a torch module.

The architecture is a plain ReLU MLP from a flattened 3k context to a
3-vector offset.  Weights stay float32 end to end: the codec replays
inference in strict 32-bit arithmetic, and training in the same width
keeps the exported file's behavior within float32 rounding of what the
trainer validated.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np
import torch
from torch import nn

from .config import TrainingConfig
from .errors import ValidationError


def build_mlp(config: TrainingConfig) -> nn.Sequential:
    """A fresh network for the config's architecture, float32, CPU."""
    dims = (
        [3 * config.context_size]
        + [config.hidden_dim] * config.hidden_layers
        + [3]
    )
    layers: List[nn.Module] = []
    for index in range(len(dims) - 1):
        layers.append(nn.Linear(dims[index], dims[index + 1]))
        if index < len(dims) - 2:
            layers.append(nn.ReLU())
    model = nn.Sequential(*layers)
    model.to(dtype=torch.float32)
    return model


def layer_arrays(model: nn.Sequential) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Extract (weight, bias) float32 pairs, one per linear layer.

    Weights come out as (out_dim, in_dim) row-major arrays, the layout
    the weight-file format stores directly.
    """
    pairs = []
    for module in model:
        if isinstance(module, nn.Linear):
            w = np.ascontiguousarray(module.weight.detach().cpu().numpy(), dtype=np.float32)
            b = np.ascontiguousarray(module.bias.detach().cpu().numpy(), dtype=np.float32)
            pairs.append((w, b))
    if not pairs:
        raise ValidationError("model contains no linear layers")
    return pairs


def parameter_count(context_size: int, hidden_dim: int, hidden_layers: int) -> int:
    """Trainable parameter count for an architecture, without building it."""
    dims = [3 * context_size] + [hidden_dim] * hidden_layers + [3]
    return sum(
        dims[i] * dims[i + 1] + dims[i + 1] for i in range(len(dims) - 1)
    )
