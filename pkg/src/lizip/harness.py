"""Benchmark and ablation harness.

The benchmark runs each frame through the codec with both entropy
backends plus a gzip-style baseline (deflate over the raw interleaved
float32 bytes), verifies every round trip exactly, and reports sizes,
timings, and reconstruction error.  Timings cover encode/decode work
only, never file I/O.

The ablation ladder isolates where the ratio comes from:

    1. entropy coder over the raw float bytes
    2. quantize + Morton sort, integers entropy-coded directly
    3. plus prediction (residuals instead of coordinates)
    4. plus the byte-plane shuffle (the full pipeline)
"""

from __future__ import annotations

import json
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .container import DEFAULT_BLOCK_SIZE, _compress_sorted, decompress_quantized
from .entropy import Backend, compress
from .errors import CorruptionError, ValidationError
from .geometry import PointCloud, dequantize, max_reconstruction_error, quantize
from .ingest import FrameSpec, frame_bytes, read_frame
from .morton import morton_sort
from .predictor import PredictorModel, linear_model

GZIP_LEVEL = 6
LATENCY_BUDGET_S = 1.0


@dataclass
class CodecConfig:
    """Codec settings shared by every frame in a run."""

    scale: float = 1e5
    block_size: int = DEFAULT_BLOCK_SIZE
    model: PredictorModel = field(default_factory=linear_model)
    backend: Backend = Backend.LZMA
    level: Optional[int] = None


@dataclass
class BenchRecord:
    """One frame under one method."""

    frame: str
    method: str
    point_count: int
    original_bytes: int
    compressed_bytes: int
    ratio: float
    encode_ms: float
    decode_ms: float
    max_error_mm: float


@dataclass
class AblationReport:
    """Compressed sizes after each pipeline stage, in bytes."""

    raw_entropy: int
    quantized: int
    predicted: int
    shuffled: int


def _sorted_quantized(cloud: PointCloud, config: CodecConfig):
    qcloud = quantize(cloud, config.scale)
    sorted_cloud, perm = morton_sort(qcloud)
    return sorted_cloud, perm


def _verify_roundtrip(sorted_cloud, decoded) -> None:
    if not np.array_equal(decoded.coords, sorted_cloud.coords):
        raise CorruptionError("round-trip verification failed: coordinates differ")
    if (sorted_cloud.intensity is None) != (decoded.intensity is None):
        raise CorruptionError("round-trip verification failed: intensity presence differs")
    if sorted_cloud.intensity is not None and not np.array_equal(
        decoded.intensity, sorted_cloud.intensity
    ):
        raise CorruptionError("round-trip verification failed: intensity differs")


def _bench_frame(name: str, cloud: PointCloud, config: CodecConfig) -> List[BenchRecord]:
    raw = frame_bytes(cloud, with_intensity=cloud.intensity is not None)
    original = len(raw)
    sorted_cloud, perm = _sorted_quantized(cloud, config)
    aligned = PointCloud(
        points=cloud.points[perm],
        intensity=None if cloud.intensity is None else cloud.intensity[perm],
    )
    records = []

    for backend in (Backend.LZMA, Backend.DEFLATE):
        start = time.perf_counter()
        blob = _compress_sorted(
            sorted_cloud, backend, config.model, config.block_size, config.level
        )
        encode_ms = (time.perf_counter() - start) * 1000.0
        start = time.perf_counter()
        decoded = decompress_quantized(blob, config.model)
        decode_ms = (time.perf_counter() - start) * 1000.0
        _verify_roundtrip(sorted_cloud, decoded)
        error_mm = max_reconstruction_error(aligned, dequantize(decoded))
        records.append(
            BenchRecord(
                frame=name,
                method=f"lizip-{backend.label}",
                point_count=len(cloud),
                original_bytes=original,
                compressed_bytes=len(blob),
                ratio=original / len(blob) if len(blob) else 0.0,
                encode_ms=encode_ms,
                decode_ms=decode_ms,
                max_error_mm=error_mm,
            )
        )

    start = time.perf_counter()
    gz = zlib.compress(raw, GZIP_LEVEL)
    encode_ms = (time.perf_counter() - start) * 1000.0
    start = time.perf_counter()
    back = zlib.decompress(gz)
    decode_ms = (time.perf_counter() - start) * 1000.0
    if back != raw:
        raise CorruptionError("round-trip verification failed: gzip baseline differs")
    records.append(
        BenchRecord(
            frame=name,
            method="gzip-raw",
            point_count=len(cloud),
            original_bytes=original,
            compressed_bytes=len(gz),
            ratio=original / len(gz) if len(gz) else 0.0,
            encode_ms=encode_ms,
            decode_ms=decode_ms,
            max_error_mm=0.0,
        )
    )
    return records


def run_bench(
    frames: Sequence[FrameSpec],
    config: Optional[CodecConfig] = None,
    parallel: bool = False,
) -> List[BenchRecord]:
    """Benchmark every frame under lizip-lzma, lizip-deflate, and gzip-raw.

    Any round-trip mismatch raises immediately; a benchmark that cannot
    reproduce its input has nothing worth reporting.  With ``parallel``
    the frames run on a thread pool; record order stays deterministic
    but per-frame timings become less trustworthy.
    """
    if config is None:
        config = CodecConfig()
    clouds = [(str(spec.path), read_frame(spec)) for spec in frames]
    if parallel and len(clouds) > 1:
        with ThreadPoolExecutor() as pool:
            futures = [
                pool.submit(_bench_frame, name, cloud, config) for name, cloud in clouds
            ]
            results = [future.result() for future in futures]
    else:
        results = [_bench_frame(name, cloud, config) for name, cloud in clouds]
    return [record for group in results for record in group]


def aggregate(records: Sequence[BenchRecord]) -> Dict[str, Dict[str, float]]:
    """Per-method means and standard deviations across frames."""
    methods: Dict[str, List[BenchRecord]] = {}
    for record in records:
        methods.setdefault(record.method, []).append(record)
    summary = {}
    for method, group in sorted(methods.items()):
        sizes = np.array([r.compressed_bytes for r in group], dtype=np.float64)
        ratios = np.array([r.ratio for r in group], dtype=np.float64)
        encodes = np.array([r.encode_ms for r in group], dtype=np.float64)
        decodes = np.array([r.decode_ms for r in group], dtype=np.float64)
        errors = np.array([r.max_error_mm for r in group], dtype=np.float64)
        summary[method] = {
            "frames": len(group),
            "mean_compressed_bytes": float(sizes.mean()),
            "std_compressed_bytes": float(sizes.std()),
            "mean_ratio": float(ratios.mean()),
            "mean_encode_ms": float(encodes.mean()),
            "mean_decode_ms": float(decodes.mean()),
            "max_error_mm": float(errors.max()) if len(errors) else 0.0,
        }
    return summary


def cumulative_sizes(records: Sequence[BenchRecord]) -> Dict[str, List[int]]:
    """Running total of compressed bytes per method, in frame order."""
    totals: Dict[str, List[int]] = {}
    for record in records:
        series = totals.setdefault(record.method, [])
        last = series[-1] if series else 0
        series.append(last + record.compressed_bytes)
    return totals


def write_report(records: Sequence[BenchRecord], path) -> None:
    """One JSON object per line, one line per record."""
    with open(path, "w") as handle:
        for record in records:
            handle.write(json.dumps(asdict(record)))
            handle.write("\n")


def run_ablation(cloud: PointCloud, config: Optional[CodecConfig] = None) -> AblationReport:
    """Measure compressed size after each pipeline stage on one cloud."""
    if config is None:
        config = CodecConfig()
    if len(cloud) == 0:
        raise ValidationError("ablation needs a non-empty cloud")
    raw = frame_bytes(cloud, with_intensity=cloud.intensity is not None)
    sorted_cloud, _ = _sorted_quantized(cloud, config)
    stage_raw = len(compress(config.backend, raw, config.level))
    stage_quant = len(
        _compress_sorted(
            sorted_cloud, config.backend, config.model, config.block_size,
            config.level, predict=False, shuffle=False,
        )
    )
    stage_pred = len(
        _compress_sorted(
            sorted_cloud, config.backend, config.model, config.block_size,
            config.level, predict=True, shuffle=False,
        )
    )
    stage_full = len(
        _compress_sorted(
            sorted_cloud, config.backend, config.model, config.block_size,
            config.level, predict=True, shuffle=True,
        )
    )
    return AblationReport(
        raw_entropy=stage_raw,
        quantized=stage_quant,
        predicted=stage_pred,
        shuffled=stage_full,
    )


def residual_sharpness(cloud: PointCloud, config: Optional[CodecConfig] = None) -> float:
    """Fraction of residual magnitudes below 16 grid steps.

    A sharply peaked residual distribution is what makes the byte planes
    compressible; smooth scans should score close to 1.
    """
    from .residual import encode_block

    if config is None:
        config = CodecConfig()
    sorted_cloud, _ = _sorted_quantized(cloud, config)
    n = len(sorted_cloud)
    if n <= config.model.context_size:
        raise ValidationError("cloud too small to produce residuals")
    magnitudes = []
    for start in range(0, n, config.block_size):
        stop = min(start + config.block_size, n)
        block = encode_block(
            sorted_cloud.coords[start:stop].astype(np.int64), config.model,
            sorted_cloud.scale,
        )
        if block.residuals.size:
            magnitudes.append(np.abs(block.residuals.astype(np.int64)).ravel())
    if not magnitudes:
        raise ValidationError("cloud produced no residuals")
    values = np.concatenate(magnitudes)
    return float(np.mean(values < 16))
