"""Pluggable entropy backends over the shuffled byte stream.

Both backends come from the standard library.  Deflate is the zlib
stream format; the LZMA backend uses the legacy single-stream .lzma
container (lzma.FORMAT_ALONE), whose fixed 13-byte header keeps tiny
payloads tiny.  Backend identifiers are the exact byte values written
into the container header.
"""

from __future__ import annotations

import lzma
import zlib
from enum import IntEnum
from typing import Optional

from .errors import CorruptionError, ValidationError

DEFAULT_DEFLATE_LEVEL = 6
DEFAULT_LZMA_PRESET = 6


class Backend(IntEnum):
    """Entropy coder identifiers as stored in the container header."""

    DEFLATE = 0x01
    LZMA = 0x02

    @property
    def label(self) -> str:
        return "deflate" if self is Backend.DEFLATE else "lzma"

    @classmethod
    def from_flag(cls, flag: int) -> "Backend":
        try:
            return cls(flag)
        except ValueError:
            raise ValidationError(f"unknown compression backend 0x{flag:02x}") from None


def compress(backend: Backend, data: bytes, level: Optional[int] = None) -> bytes:
    """Compress one buffer with the chosen backend."""
    backend = Backend(backend)
    if backend is Backend.DEFLATE:
        if level is None:
            level = DEFAULT_DEFLATE_LEVEL
        if not 0 <= level <= 9:
            raise ValidationError(f"deflate level {level} outside [0, 9]")
        return zlib.compress(data, level)
    if level is None:
        level = DEFAULT_LZMA_PRESET
    if not 0 <= level <= 9:
        raise ValidationError(f"lzma preset {level} outside [0, 9]")
    return lzma.compress(data, format=lzma.FORMAT_ALONE, preset=level)


def decompress(backend: Backend, data: bytes) -> bytes:
    """Invert compress; raises CorruptionError on damaged or foreign streams."""
    backend = Backend(backend)
    try:
        if backend is Backend.DEFLATE:
            return zlib.decompress(data)
        return lzma.decompress(data, format=lzma.FORMAT_ALONE)
    except (zlib.error, lzma.LZMAError) as exc:
        raise CorruptionError(f"{backend.label} stream is damaged: {exc}") from exc
