"""lizip: a near-lossless, zero-drift LiDAR point cloud codec.

The pipeline quantizes points onto a uniform grid, orders them along a
Morton space-filling curve, predicts each point from its predecessors
(a small MLP or an integer linear extrapolation), and entropy-codes the
byte-shuffled integer residuals.  Everything after quantization is
exactly invertible, so reconstruction error is bounded by half a grid
step and never accumulates.
"""

from .container import (
    DEFAULT_BLOCK_SIZE,
    ContainerInfo,
    Header,
    compress_cloud,
    decompress_cloud,
    decompress_quantized,
    inspect_container,
    pack_header,
    parse_header,
)
from .entropy import Backend, compress, decompress
from .errors import (
    CorruptionError,
    FormatError,
    LizipError,
    RangeError,
    ValidationError,
)
from .geometry import (
    INTENSITY_SCALE,
    PointCloud,
    QuantizedCloud,
    dequantize,
    max_reconstruction_error,
    quantize,
)
from .harness import (
    AblationReport,
    BenchRecord,
    CodecConfig,
    aggregate,
    cumulative_sizes,
    residual_sharpness,
    run_ablation,
    run_bench,
    write_report,
)
from .ingest import FrameSpec, frame_bytes, read_frame, synth_cloud, write_frame
from .morton import (
    AXIS_LIMIT,
    MAX_AXIS_BITS,
    morton_codes,
    morton_encode,
    morton_sort,
    spread_bits,
)
from .predictor import (
    PredictionContext,
    PredictorModel,
    build_context,
    linear_model,
    load_lizm,
    mlp_model,
    predict,
    predict_offset,
    read_lizm,
    save_lizm,
    write_lizm,
)
from .residual import (
    ResidualBlock,
    byte_shuffle,
    byte_unshuffle,
    decode_block,
    deserialize_block,
    encode_block,
    serialize_block,
)

__version__ = "0.1.0"

__all__ = [
    "AXIS_LIMIT",
    "AblationReport",
    "Backend",
    "BenchRecord",
    "CodecConfig",
    "ContainerInfo",
    "CorruptionError",
    "DEFAULT_BLOCK_SIZE",
    "FormatError",
    "FrameSpec",
    "Header",
    "INTENSITY_SCALE",
    "LizipError",
    "MAX_AXIS_BITS",
    "PointCloud",
    "PredictionContext",
    "PredictorModel",
    "QuantizedCloud",
    "RangeError",
    "ResidualBlock",
    "ValidationError",
    "aggregate",
    "build_context",
    "byte_shuffle",
    "byte_unshuffle",
    "compress",
    "compress_cloud",
    "cumulative_sizes",
    "decode_block",
    "decompress",
    "decompress_cloud",
    "decompress_quantized",
    "dequantize",
    "deserialize_block",
    "encode_block",
    "frame_bytes",
    "inspect_container",
    "linear_model",
    "load_lizm",
    "max_reconstruction_error",
    "mlp_model",
    "morton_codes",
    "morton_encode",
    "morton_sort",
    "pack_header",
    "parse_header",
    "predict",
    "predict_offset",
    "quantize",
    "read_frame",
    "read_lizm",
    "residual_sharpness",
    "run_ablation",
    "run_bench",
    "save_lizm",
    "serialize_block",
    "spread_bits",
    "synth_cloud",
    "write_frame",
    "write_lizm",
    "write_report",
]
