"""The LIZP container: header plus independently framed blocks.

Layout (all little-endian, see docs/format.md for the byte tables):

    offset  size  field
    0       4     magic "LIZP"
    4       1     compression flag (0x01 deflate, 0x02 lzma)
    5       3     reserved, zero
    8       4     u32 total point count
    12      4     u32 block count
    16      4     f32 grid scale (lines per meter)
    20      4     u32 content flags (bit 0 geometry, bit 1 intensity)

Each block frame is u32 compressed length, u32 point count, then the
compressed bytes.  Blocks are self-contained: anchors restart the
predictor and intensity deltas restart from the block's first point, so
a block can be decoded without touching its neighbors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import entropy
from .entropy import Backend
from .errors import CorruptionError, FormatError, ValidationError
from .geometry import PointCloud, QuantizedCloud, dequantize, quantize
from .morton import morton_sort
from .predictor import PredictorModel, linear_model
from .residual import (
    byte_shuffle,
    byte_unshuffle,
    decode_block,
    deserialize_block,
    encode_block,
    serialize_block,
)

MAGIC = b"LIZP"
HEADER_SIZE = 24
DEFAULT_BLOCK_SIZE = 16384

FLAG_GEOMETRY = 0x1
FLAG_INTENSITY = 0x2

_HEADER = struct.Struct("<4sB3sIIfI")
_FRAME = struct.Struct("<II")


@dataclass
class Header:
    """The decoded LIZP file header."""

    backend: Backend
    total_point_count: int
    block_count: int
    scale: float
    content_flags: int

    @property
    def has_intensity(self) -> bool:
        return bool(self.content_flags & FLAG_INTENSITY)


@dataclass
class BlockInfo:
    compressed_length: int
    point_count: int


@dataclass
class ContainerInfo:
    """Everything inspect() reports without decompressing any payload."""

    header: Header
    backend_name: str
    blocks: List[BlockInfo]


def pack_header(header: Header) -> bytes:
    return _HEADER.pack(
        MAGIC,
        int(header.backend),
        b"\x00\x00\x00",
        header.total_point_count,
        header.block_count,
        header.scale,
        header.content_flags,
    )


def parse_header(data: bytes) -> Header:
    """Parse and validate the 24-byte header."""
    if len(data) < HEADER_SIZE:
        raise FormatError(f"container too short for a header: {len(data)} bytes")
    magic, flag, reserved, total, blocks, scale, content = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"bad container magic {magic!r}")
    if reserved != b"\x00\x00\x00":
        raise FormatError(f"reserved header bytes are not zero: {reserved!r}")
    try:
        backend = Backend.from_flag(flag)
    except ValidationError:
        raise FormatError(f"unknown compression backend 0x{flag:02x}") from None
    if not content & FLAG_GEOMETRY:
        raise FormatError("content flags do not include geometry")
    if content & ~(FLAG_GEOMETRY | FLAG_INTENSITY):
        raise FormatError(f"unknown content flag bits 0x{content:x}")
    if not (np.isfinite(scale) and scale > 0):
        raise FormatError(f"bad grid scale {scale}")
    return Header(
        backend=backend,
        total_point_count=total,
        block_count=blocks,
        scale=float(scale),
        content_flags=content,
    )


def _intensity_deltas(values: np.ndarray) -> np.ndarray:
    """First value verbatim, then consecutive differences, as int32."""
    signed = values.astype(np.int64)
    deltas = np.empty(signed.shape[0], dtype=np.int64)
    if signed.shape[0]:
        deltas[0] = signed[0]
        deltas[1:] = signed[1:] - signed[:-1]
    return deltas.astype(np.int32)


def _intensity_from_deltas(deltas: np.ndarray) -> np.ndarray:
    values = np.cumsum(deltas.astype(np.int64))
    if values.size and (int(values.min()) < 0 or int(values.max()) > 65535):
        raise CorruptionError("intensity deltas walk outside the 16-bit range")
    return values.astype(np.uint16)


def _encode_one_block(
    coords: np.ndarray,
    intensity: Optional[np.ndarray],
    model: PredictorModel,
    scale: float,
    backend: Backend,
    level: Optional[int],
    predict: bool,
    shuffle: bool,
) -> bytes:
    """Compress one block's points (and intensity) to its payload bytes.

    ``predict`` and ``shuffle`` exist for the ablation harness; the
    normal pipeline keeps both on.
    """
    if predict:
        block = encode_block(coords, model, scale)
        plain = serialize_block(block)
    else:
        # Coordinates stored verbatim take the anchors' interleaved layout.
        plain = coords.astype(np.int32).ravel()
    if intensity is not None:
        plain = np.concatenate([plain, _intensity_deltas(intensity)])
    if shuffle:
        payload = byte_shuffle(plain)
    else:
        payload = plain.astype("<i4").tobytes()
    return entropy.compress(backend, payload, level)


def _decode_one_block(
    payload: bytes,
    point_count: int,
    has_intensity: bool,
    model: PredictorModel,
    scale: float,
    backend: Backend,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    plain = byte_unshuffle(entropy.decompress(backend, payload))
    intensity = None
    if has_intensity:
        if plain.shape[0] < point_count:
            raise CorruptionError(
                f"block payload holds {plain.shape[0]} values, too few for "
                f"{point_count} intensity deltas"
            )
        split = plain.shape[0] - point_count
        intensity = _intensity_from_deltas(plain[split:])
        plain = plain[:split]
    block = deserialize_block(plain, point_count, model.context_size)
    coords = decode_block(block, model, scale)
    return coords, intensity


def _compress_sorted(
    sorted_cloud: QuantizedCloud,
    backend: Backend,
    model: PredictorModel,
    block_size: int,
    level: Optional[int],
    predict: bool = True,
    shuffle: bool = True,
) -> bytes:
    coords = sorted_cloud.coords
    intensity = sorted_cloud.intensity
    n = coords.shape[0]
    frames = []
    block_count = 0
    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        block_intensity = None if intensity is None else intensity[start:stop]
        payload = _encode_one_block(
            coords[start:stop], block_intensity, model, sorted_cloud.scale,
            backend, level, predict, shuffle,
        )
        frames.append(_FRAME.pack(len(payload), stop - start))
        frames.append(payload)
        block_count += 1

    content = FLAG_GEOMETRY
    if intensity is not None:
        content |= FLAG_INTENSITY
    header = Header(
        backend=backend,
        total_point_count=n,
        block_count=block_count,
        scale=sorted_cloud.scale,
        content_flags=content,
    )
    return pack_header(header) + b"".join(frames)


def compress_cloud(
    cloud: PointCloud,
    scale: float,
    backend: Backend = Backend.LZMA,
    model: Optional[PredictorModel] = None,
    block_size: int = DEFAULT_BLOCK_SIZE,
    level: Optional[int] = None,
) -> bytes:
    """Quantize, Morton-sort, and encode a cloud into LIZP bytes.

    The scale is carried in the header as float32, so it is snapped to
    float32 here before quantization; encoder and decoder then agree on
    the grid exactly.  The emitted stream stores points in Morton order
    and does not retain the input ordering.
    """
    if model is None:
        model = linear_model()
    with np.errstate(over="ignore"):
        scale32 = float(np.float32(scale))
    if not (np.isfinite(scale32) and scale32 > 0):
        raise ValidationError(f"scale must be positive and finite in float32, got {scale!r}")
    if block_size < 1:
        raise ValidationError(f"block size must be >= 1, got {block_size}")
    if block_size < model.context_size:
        raise ValidationError(
            f"block size {block_size} is smaller than the predictor context "
            f"{model.context_size}"
        )
    qcloud = quantize(cloud, scale32)
    sorted_cloud, _ = morton_sort(qcloud)
    return _compress_sorted(
        sorted_cloud, Backend.from_flag(int(backend)), model, block_size, level
    )


def decompress_quantized(data: bytes, model: Optional[PredictorModel] = None) -> QuantizedCloud:
    """Decode LIZP bytes back to the exact quantized cloud, in Morton order.

    ``model`` must be the predictor the stream was encoded with; the
    container itself stores no weights.
    """
    if model is None:
        model = linear_model()
    header = parse_header(data)
    cursor = HEADER_SIZE
    coords_parts = []
    intensity_parts = []
    for index in range(header.block_count):
        if cursor + _FRAME.size > len(data):
            raise CorruptionError(f"block {index}: frame header truncated")
        compressed_length, point_count = _FRAME.unpack_from(data, cursor)
        cursor += _FRAME.size
        if cursor + compressed_length > len(data):
            raise CorruptionError(
                f"block {index}: payload truncated "
                f"({len(data) - cursor} of {compressed_length} bytes present)"
            )
        payload = data[cursor : cursor + compressed_length]
        cursor += compressed_length
        try:
            coords, intensity = _decode_one_block(
                payload, point_count, header.has_intensity, model,
                header.scale, header.backend,
            )
        except CorruptionError as exc:
            raise CorruptionError(f"block {index}: {exc}") from exc
        coords_parts.append(coords)
        if intensity is not None:
            intensity_parts.append(intensity)

    if cursor != len(data):
        raise CorruptionError(f"{len(data) - cursor} trailing bytes after the last block")

    coords = (
        np.concatenate(coords_parts) if coords_parts else np.empty((0, 3), dtype=np.int32)
    )
    if coords.shape[0] != header.total_point_count:
        raise CorruptionError(
            f"blocks decode to {coords.shape[0]} points, header promises "
            f"{header.total_point_count}"
        )
    intensity = None
    if header.has_intensity:
        intensity = (
            np.concatenate(intensity_parts)
            if intensity_parts
            else np.empty(0, dtype=np.uint16)
        )
    return QuantizedCloud(coords=coords, scale=header.scale, intensity=intensity)


def decompress_cloud(data: bytes, model: Optional[PredictorModel] = None) -> PointCloud:
    """Decode LIZP bytes to metric coordinates (Morton order)."""
    return dequantize(decompress_quantized(data, model))


def inspect_container(data: bytes) -> ContainerInfo:
    """Summarize a container's header and block table without decompressing."""
    header = parse_header(data)
    cursor = HEADER_SIZE
    blocks = []
    for index in range(header.block_count):
        if cursor + _FRAME.size > len(data):
            raise CorruptionError(f"block {index}: frame header truncated")
        compressed_length, point_count = _FRAME.unpack_from(data, cursor)
        cursor += _FRAME.size
        if cursor + compressed_length > len(data):
            raise CorruptionError(f"block {index}: payload truncated")
        cursor += compressed_length
        blocks.append(BlockInfo(compressed_length=compressed_length, point_count=point_count))
    if cursor != len(data):
        raise CorruptionError(f"{len(data) - cursor} trailing bytes after the last block")
    return ContainerInfo(header=header, backend_name=header.backend.label, blocks=blocks)
