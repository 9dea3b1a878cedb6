"""Frame readers, writers, and synthetic test clouds.

Three on-disk frame layouts are supported:

* ``raw_f32x4``: little-endian float32 records of x, y, z, intensity.
* ``raw_f32x5``: the same plus a trailing ring/channel column, ignored
  on read and written as zero.
* ``ascii_xyz``: one "x y z" or "x y z i" line per point.

Values pass through float32 on every path, so writing a frame and
reading it back reproduces the cloud exactly at 32-bit precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import FormatError, ValidationError
from .geometry import PointCloud

FORMAT_RAW_F32X4 = "raw_f32x4"
FORMAT_RAW_F32X5 = "raw_f32x5"
FORMAT_ASCII_XYZ = "ascii_xyz"

FORMATS = (FORMAT_RAW_F32X4, FORMAT_RAW_F32X5, FORMAT_ASCII_XYZ)

_RECORD_FLOATS = {FORMAT_RAW_F32X4: 4, FORMAT_RAW_F32X5: 5}

SYNTH_KINDS = ("plane", "sphere", "corridor", "uniform_random")


@dataclass
class FrameSpec:
    """Where a frame lives and how to interpret it."""

    path: Path
    format: str = FORMAT_RAW_F32X4
    has_intensity: bool = False

    def __post_init__(self):
        self.path = Path(self.path)
        if self.format not in FORMATS:
            raise ValidationError(f"unknown frame format {self.format!r}")


def read_frame(spec: FrameSpec) -> PointCloud:
    """Load one frame from disk as a point cloud."""
    if spec.format == FORMAT_ASCII_XYZ:
        return _read_ascii(spec)
    floats = _RECORD_FLOATS[spec.format]
    data = spec.path.read_bytes()
    record_bytes = 4 * floats
    if len(data) % record_bytes != 0:
        raise FormatError(
            f"{spec.path}: length {len(data)} is not a multiple of the "
            f"{record_bytes}-byte record"
        )
    table = np.frombuffer(data, dtype="<f4").reshape(-1, floats)
    points = table[:, :3].astype(np.float64)
    intensity = table[:, 3].astype(np.float64) if spec.has_intensity else None
    return PointCloud(points=points, intensity=intensity)


def _read_ascii(spec: FrameSpec) -> PointCloud:
    points = []
    intensity = [] if spec.has_intensity else None
    expected = 4 if spec.has_intensity else 3
    with open(spec.path, "r") as handle:
        for number, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            fields = stripped.split()
            if len(fields) < expected or len(fields) > 4:
                raise FormatError(
                    f"{spec.path}:{number}: expected {expected} columns, "
                    f"got {len(fields)}"
                )
            try:
                values = [float(field) for field in fields]
            except ValueError:
                raise FormatError(f"{spec.path}:{number}: unparsable number") from None
            points.append(values[:3])
            if intensity is not None:
                intensity.append(values[3])
    pts = np.array(points, dtype=np.float32).astype(np.float64).reshape(-1, 3)
    inten = None
    if intensity is not None:
        inten = np.array(intensity, dtype=np.float32).astype(np.float64)
    return PointCloud(points=pts, intensity=inten)


def write_frame(cloud: PointCloud, spec: FrameSpec) -> Path:
    """Store a cloud in the requested on-disk layout."""
    if spec.has_intensity and cloud.intensity is None:
        raise ValidationError(f"{spec.format} with intensity needs a cloud that has it")
    n = len(cloud)
    if spec.format == FORMAT_ASCII_XYZ:
        columns = [cloud.points.astype(np.float32)]
        if spec.has_intensity:
            columns.append(cloud.intensity.astype(np.float32).reshape(-1, 1))
        table = np.hstack(columns) if n else np.empty((0, 3), dtype=np.float32)
        with open(spec.path, "w") as handle:
            for row in table:
                handle.write(" ".join(f"{value:.9g}" for value in row))
                handle.write("\n")
        return spec.path

    floats = _RECORD_FLOATS[spec.format]
    table = np.zeros((n, floats), dtype="<f4")
    table[:, :3] = cloud.points.astype(np.float32)
    if spec.has_intensity:
        table[:, 3] = cloud.intensity.astype(np.float32)
    spec.path.write_bytes(table.tobytes())
    return spec.path


def frame_bytes(cloud: PointCloud, with_intensity: bool = False) -> bytes:
    """The raw interleaved float32 bytes of a cloud, as a baseline payload."""
    if with_intensity and cloud.intensity is None:
        raise ValidationError("cloud has no intensity channel")
    columns = 4 if with_intensity else 3
    table = np.zeros((len(cloud), columns), dtype="<f4")
    table[:, :3] = cloud.points.astype(np.float32)
    if with_intensity:
        table[:, 3] = cloud.intensity.astype(np.float32)
    return table.tobytes()


def synth_cloud(
    kind: str,
    n: int,
    noise_sigma: float = 0.0,
    seed: int = 0,
    with_intensity: bool = False,
) -> PointCloud:
    """Deterministic synthetic scans for tests and benchmarks.

    The smooth kinds emulate how a scanning sensor samples a surface:
    points sit on a regular sweep lattice (scan rows and columns with a
    touch of angular jitter) and ``noise_sigma`` perturbs the measured
    range along each ray, which is where real ranging error lives.
    ``uniform_random`` has no structure at all and is the incompressible
    control.  Extents stay within a couple dozen meters so fine grids
    still fit the 21-bit Morton window.
    """
    if kind not in SYNTH_KINDS:
        raise ValidationError(f"unknown synthetic kind {kind!r}")
    if n < 0:
        raise ValidationError(f"point count must be >= 0, got {n}")
    rng = np.random.default_rng(seed)

    if kind == "plane":
        points = _plane_scan(rng, n, noise_sigma)
    elif kind == "sphere":
        points = _sphere_scan(rng, n, noise_sigma)
    elif kind == "corridor":
        points = _corridor_scan(rng, n, noise_sigma)
    else:
        points = rng.uniform(-8.0, 8.0, (n, 3))
        if noise_sigma > 0.0:
            points = points + rng.normal(0.0, noise_sigma, (n, 3))
        points = points.astype(np.float32)

    intensity = None
    if with_intensity:
        intensity = rng.uniform(0.0, 1.0, n).astype(np.float32).astype(np.float64)
    return PointCloud(points=points.astype(np.float64), intensity=intensity)


_AZIMUTH_JITTER = 0.02


def _spin(rng: np.random.Generator, n: int, rows: int):
    """Azimuths and row indices of a row-major spinning sweep.

    Beam elevations are fixed per row like a real multi-beam unit; only
    the azimuth carries a whisper of encoder jitter.
    """
    rows = max(1, min(rows, n if n else 1))
    cols = -(-n // rows) if n else 1
    steps = np.tile(np.arange(cols, dtype=np.float64), rows)[:n]
    row = np.repeat(np.arange(rows), cols)[:n]
    azimuth = (steps + rng.normal(0.0, _AZIMUTH_JITTER, n)) * (2.0 * np.pi / cols)
    return azimuth, row


def _plane_scan(rng: np.random.Generator, n: int, noise_sigma: float) -> np.ndarray:
    """Ground rings under a scanner 1.8 m above a gently tilted patch.

    Each beam row traces a circle on the ground, so neighboring points
    sit centimeters apart along a ring while rings sit much farther
    apart, the anisotropy a spinning sensor always produces.  The
    surface height is evaluated in float32 arithmetic, so with zero
    noise every stored point satisfies the plane equation exactly.
    """
    height = 1.8
    rings = 40
    azimuth, row = _spin(rng, n, rings)
    radii = np.geomspace(0.6, 7.9, rings)[row] if n else np.empty(0)
    x = (radii * np.cos(azimuth)).astype(np.float32)
    y = (radii * np.sin(azimuth)).astype(np.float32)
    z = np.float32(0.08) * x + np.float32(0.03) * y + np.float32(1.5)
    if noise_sigma > 0.0:
        # Range noise along the ray, projected onto the vertical by the
        # (almost constant per ring) incidence geometry.
        slant = np.sqrt(radii**2 + height**2)
        z = (
            z.astype(np.float64) + rng.normal(0.0, noise_sigma, n) * height / slant
        ).astype(np.float32)
    return np.stack([x, y, z], axis=1)


def _sphere_scan(rng: np.random.Generator, n: int, noise_sigma: float) -> np.ndarray:
    """A spinning sweep from the center of a 6 m sphere."""
    azimuth, row = _spin(rng, n, 32)
    elevation = np.deg2rad(np.linspace(-80.0, 80.0, 32))[row] if n else np.empty(0)
    directions = _rays(azimuth, elevation)
    ranges = np.full(n, 6.0)
    if noise_sigma > 0.0:
        ranges = ranges + rng.normal(0.0, noise_sigma, n)
    return (directions * ranges[:, None]).astype(np.float32)


def _corridor_scan(rng: np.random.Generator, n: int, noise_sigma: float) -> np.ndarray:
    """A 16-beam spin from the middle of a closed 20 x 10 x 6 m hall.

    Few beams and a fast azimuth clock give the strongly anisotropic
    sampling of real spinning units: centimeters between ring neighbors,
    decimeters between rings.
    """
    origin = np.array([10.0, 0.0, 3.0])
    azimuth, row = _spin(rng, n, 16)
    elevation = np.deg2rad(np.linspace(-80.0, 80.0, 16))[row] if n else np.empty(0)
    directions = _rays(azimuth, elevation)
    lo = np.array([0.0, -5.0, 0.0])
    hi = np.array([20.0, 5.0, 6.0])
    with np.errstate(divide="ignore", invalid="ignore"):
        to_lo = (lo - origin) / directions
        to_hi = (hi - origin) / directions
    hits = np.concatenate([to_lo, to_hi], axis=1)
    hits[~np.isfinite(hits)] = np.inf
    hits[hits <= 0.0] = np.inf
    ranges = hits.min(axis=1)
    if noise_sigma > 0.0:
        ranges = ranges + rng.normal(0.0, noise_sigma, n)
    return (origin + directions * ranges[:, None]).astype(np.float32)


def _rays(azimuth: np.ndarray, elevation: np.ndarray) -> np.ndarray:
    cos_el = np.cos(elevation)
    return np.stack(
        [cos_el * np.cos(azimuth), cos_el * np.sin(azimuth), np.sin(elevation)],
        axis=1,
    )
