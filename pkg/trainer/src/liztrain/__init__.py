"""Offline trainer for the lizip offset predictor.

The package turns point-cloud frames into (context, offset) training
pairs using the codec's exact quantization and Morton ordering, trains
a float32 ReLU MLP with seeded minibatch Adam on mean squared error,
and exports the weights in the LIZM layout the codec loads.  It shares
no code with the codec; the weight file and the frame formats are the
whole interface between the two.

The torch-backed pieces (train, build_mlp, and friends) load lazily so
that config parsing and dataset work never pay for torch startup.
"""

import importlib

from .config import LOSS_MSE, TrainingConfig, load_config, save_config
from .dataset import build_training_set, frame_pairs
from .errors import (
    DivergenceError,
    FormatError,
    TrainerError,
    ValidationError,
)
from .export import (
    LIZM_MAGIC,
    LIZM_VERSION,
    export_lizm,
    lizm_bytes,
    lizm_size,
)
from .frames import (
    FORMAT_ASCII_XYZ,
    FORMAT_RAW_F32X4,
    FORMAT_RAW_F32X5,
    FORMATS,
    FrameSource,
    discover_frames,
    read_points,
)
from .grid import (
    AXIS_LIMIT,
    MAX_AXIS_BITS,
    grid_sort,
    morton_perm,
    quantize_points,
)

__version__ = "0.1.0"

_LAZY = {
    "EpochRecord": "training",
    "TrainingResult": "training",
    "train": "training",
    "build_mlp": "model",
    "layer_arrays": "model",
    "parameter_count": "model",
}


def __getattr__(name):
    module = _LAZY.get(name)
    if module is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    value = getattr(importlib.import_module(f".{module}", __name__), name)
    globals()[name] = value
    return value


__all__ = [
    "AXIS_LIMIT",
    "DivergenceError",
    "EpochRecord",
    "FORMATS",
    "FORMAT_ASCII_XYZ",
    "FORMAT_RAW_F32X4",
    "FORMAT_RAW_F32X5",
    "FormatError",
    "FrameSource",
    "LIZM_MAGIC",
    "LIZM_VERSION",
    "LOSS_MSE",
    "MAX_AXIS_BITS",
    "TrainerError",
    "TrainingConfig",
    "TrainingResult",
    "ValidationError",
    "build_mlp",
    "build_training_set",
    "discover_frames",
    "export_lizm",
    "frame_pairs",
    "grid_sort",
    "layer_arrays",
    "lizm_bytes",
    "lizm_size",
    "load_config",
    "morton_perm",
    "parameter_count",
    "quantize_points",
    "read_points",
    "save_config",
    "train",
    "__version__",
]
