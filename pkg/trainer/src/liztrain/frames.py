"""Readers for the point-cloud frame files the codec ecosystem uses.

Only the geometry matters for training, so every reader returns an
(n, 3) float64 array and drops any trailing columns:

* ``raw_f32x4``: little-endian float32 records of x, y, z, intensity.
* ``raw_f32x5``: the same plus a ring/channel column.
* ``ascii_xyz``: one "x y z" or "x y z i" line per point.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from .errors import FormatError, ValidationError

FORMAT_RAW_F32X4 = "raw_f32x4"
FORMAT_RAW_F32X5 = "raw_f32x5"
FORMAT_ASCII_XYZ = "ascii_xyz"

FORMATS = (FORMAT_RAW_F32X4, FORMAT_RAW_F32X5, FORMAT_ASCII_XYZ)

_RECORD_FLOATS = {FORMAT_RAW_F32X4: 4, FORMAT_RAW_F32X5: 5}


@dataclass
class FrameSource:
    """A frame file on disk and the layout to read it with."""

    path: Path
    format: str = FORMAT_RAW_F32X4

    def __post_init__(self):
        self.path = Path(self.path)
        if self.format not in FORMATS:
            raise ValidationError(f"unknown frame format {self.format!r}")


def read_points(source: FrameSource) -> np.ndarray:
    """Load one frame's coordinates as an (n, 3) float64 array."""
    if source.format == FORMAT_ASCII_XYZ:
        return _read_ascii(source)
    floats = _RECORD_FLOATS[source.format]
    data = source.path.read_bytes()
    record_bytes = 4 * floats
    if len(data) % record_bytes != 0:
        raise FormatError(
            f"{source.path}: length {len(data)} is not a multiple of the "
            f"{record_bytes}-byte record"
        )
    table = np.frombuffer(data, dtype="<f4").reshape(-1, floats)
    return table[:, :3].astype(np.float64)


def _read_ascii(source: FrameSource) -> np.ndarray:
    rows = []
    with open(source.path, "r") as handle:
        for number, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            fields = stripped.split()
            if len(fields) < 3 or len(fields) > 4:
                raise FormatError(
                    f"{source.path}:{number}: expected 3 or 4 columns, got {len(fields)}"
                )
            try:
                rows.append([float(fields[0]), float(fields[1]), float(fields[2])])
            except ValueError:
                raise FormatError(f"{source.path}:{number}: unparsable number") from None
    if not rows:
        return np.empty((0, 3), dtype=np.float64)
    return np.array(rows, dtype=np.float64)


def discover_frames(path, format: str = FORMAT_RAW_F32X4) -> List[FrameSource]:
    """Frame sources for one file, or every regular file in a directory.

    Directory contents are taken in sorted name order so corpus order is
    reproducible across machines.
    """
    root = Path(path)
    if root.is_dir():
        files = sorted(p for p in root.iterdir() if p.is_file())
        return [FrameSource(p, format) for p in files]
    if root.is_file():
        return [FrameSource(root, format)]
    raise FileNotFoundError(str(root))
