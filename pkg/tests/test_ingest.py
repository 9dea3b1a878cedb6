import numpy as np
import pytest

from lizip import (
    FormatError,
    FrameSpec,
    PointCloud,
    ValidationError,
    frame_bytes,
    read_frame,
    synth_cloud,
    write_frame,
)
from lizip.ingest import SYNTH_KINDS


def sample_cloud(with_intensity=False):
    rng = np.random.default_rng(12)
    points = rng.uniform(-10, 10, (100, 3)).astype(np.float32).astype(np.float64)
    intensity = None
    if with_intensity:
        intensity = rng.uniform(0, 200, 100).astype(np.float32).astype(np.float64)
    return PointCloud(points, intensity=intensity)


class TestRawFormats:
    @pytest.mark.parametrize("fmt", ["raw_f32x4", "raw_f32x5"])
    @pytest.mark.parametrize("with_intensity", [False, True])
    def test_roundtrip(self, tmp_path, fmt, with_intensity):
        cloud = sample_cloud(with_intensity)
        spec = FrameSpec(tmp_path / "frame.bin", format=fmt, has_intensity=with_intensity)
        write_frame(cloud, spec)
        back = read_frame(spec)
        assert np.array_equal(back.points, cloud.points)
        if with_intensity:
            assert np.array_equal(back.intensity, cloud.intensity)
        else:
            assert back.intensity is None

    def test_record_layout(self, tmp_path):
        cloud = PointCloud(np.array([[1.0, 2.0, 3.0]]), intensity=np.array([4.0]))
        spec = FrameSpec(tmp_path / "one.bin", has_intensity=True)
        write_frame(cloud, spec)
        raw = (tmp_path / "one.bin").read_bytes()
        assert len(raw) == 16
        assert np.frombuffer(raw, dtype="<f4").tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_x5_pads_fifth_column(self, tmp_path):
        cloud = PointCloud(np.array([[1.0, 2.0, 3.0]]))
        spec = FrameSpec(tmp_path / "one.bin", format="raw_f32x5")
        write_frame(cloud, spec)
        raw = np.frombuffer((tmp_path / "one.bin").read_bytes(), dtype="<f4")
        assert raw.tolist() == [1.0, 2.0, 3.0, 0.0, 0.0]

    def test_ragged_length_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"\x00" * 17)
        with pytest.raises(FormatError, match="record"):
            read_frame(FrameSpec(path))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.bin"
        path.write_bytes(b"")
        assert len(read_frame(FrameSpec(path))) == 0

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValidationError):
            FrameSpec(tmp_path / "x.bin", format="pcd")


class TestAsciiFormat:
    def test_roundtrip(self, tmp_path):
        cloud = sample_cloud(with_intensity=True)
        spec = FrameSpec(tmp_path / "frame.xyz", format="ascii_xyz", has_intensity=True)
        write_frame(cloud, spec)
        back = read_frame(spec)
        assert np.array_equal(back.points, cloud.points)
        assert np.array_equal(back.intensity, cloud.intensity)

    def test_parses_plain_lines(self, tmp_path):
        path = tmp_path / "frame.xyz"
        path.write_text("1 2 3\n\n-4.5 0 2e1\n")
        cloud = read_frame(FrameSpec(path, format="ascii_xyz"))
        assert cloud.points.tolist() == [[1.0, 2.0, 3.0], [-4.5, 0.0, 20.0]]

    def test_optional_intensity_column_ignored(self, tmp_path):
        path = tmp_path / "frame.xyz"
        path.write_text("1 2 3 200\n")
        cloud = read_frame(FrameSpec(path, format="ascii_xyz"))
        assert cloud.intensity is None
        assert len(cloud) == 1

    def test_bad_column_count(self, tmp_path):
        path = tmp_path / "frame.xyz"
        path.write_text("1 2 3\n1 2\n")
        with pytest.raises(FormatError, match=":2"):
            read_frame(FrameSpec(path, format="ascii_xyz"))

    def test_unparsable_number(self, tmp_path):
        path = tmp_path / "frame.xyz"
        path.write_text("1 2 three\n")
        with pytest.raises(FormatError, match=":1"):
            read_frame(FrameSpec(path, format="ascii_xyz"))

    def test_missing_intensity_column(self, tmp_path):
        path = tmp_path / "frame.xyz"
        path.write_text("1 2 3\n")
        with pytest.raises(FormatError):
            read_frame(FrameSpec(path, format="ascii_xyz", has_intensity=True))


class TestFrameBytes:
    def test_geometry_only(self):
        cloud = sample_cloud()
        raw = frame_bytes(cloud)
        assert len(raw) == 100 * 12
        table = np.frombuffer(raw, dtype="<f4").reshape(100, 3)
        assert np.array_equal(table, cloud.points.astype(np.float32))

    def test_with_intensity(self):
        cloud = sample_cloud(with_intensity=True)
        raw = frame_bytes(cloud, with_intensity=True)
        assert len(raw) == 100 * 16

    def test_intensity_missing(self):
        with pytest.raises(ValidationError):
            frame_bytes(sample_cloud(), with_intensity=True)

    def test_write_requires_intensity(self, tmp_path):
        spec = FrameSpec(tmp_path / "x.bin", has_intensity=True)
        with pytest.raises(ValidationError):
            write_frame(sample_cloud(), spec)


class TestSynthClouds:
    @pytest.mark.parametrize("kind", SYNTH_KINDS)
    def test_deterministic(self, kind):
        a = synth_cloud(kind, 500, noise_sigma=0.02, seed=13)
        b = synth_cloud(kind, 500, noise_sigma=0.02, seed=13)
        assert np.array_equal(a.points, b.points)

    @pytest.mark.parametrize("kind", SYNTH_KINDS)
    def test_seed_changes_cloud(self, kind):
        a = synth_cloud(kind, 500, noise_sigma=0.02, seed=1)
        b = synth_cloud(kind, 500, noise_sigma=0.02, seed=2)
        assert not np.array_equal(a.points, b.points)

    @pytest.mark.parametrize("kind", SYNTH_KINDS)
    @pytest.mark.parametrize("n", [0, 1, 7, 1000])
    def test_sizes(self, kind, n):
        cloud = synth_cloud(kind, n, seed=3)
        assert len(cloud) == n
        assert np.all(np.isfinite(cloud.points))

    @pytest.mark.parametrize("kind", SYNTH_KINDS)
    def test_bounded_extent(self, kind):
        cloud = synth_cloud(kind, 2000, noise_sigma=0.05, seed=4)
        assert np.max(np.abs(cloud.points)) < 30.0

    def test_plane_is_exact_without_noise(self):
        cloud = synth_cloud("plane", 1000, noise_sigma=0.0, seed=5)
        x = cloud.points[:, 0].astype(np.float32)
        y = cloud.points[:, 1].astype(np.float32)
        z = np.float32(0.08) * x + np.float32(0.03) * y + np.float32(1.5)
        assert np.array_equal(cloud.points[:, 2], z.astype(np.float64))

    def test_sphere_radius(self):
        cloud = synth_cloud("sphere", 1000, noise_sigma=0.0, seed=6)
        radii = np.linalg.norm(cloud.points, axis=1)
        assert np.allclose(radii, 6.0, atol=1e-3)

    def test_corridor_points_on_walls(self):
        cloud = synth_cloud("corridor", 2000, noise_sigma=0.0, seed=7)
        pts = cloud.points
        lo = np.array([0.0, -5.0, 0.0])
        hi = np.array([20.0, 5.0, 6.0])
        assert np.all(pts >= lo - 1e-3)
        assert np.all(pts <= hi + 1e-3)
        # Every point touches at least one face of the box.
        face = (np.abs(pts - lo) < 1e-3) | (np.abs(pts - hi) < 1e-3)
        assert np.all(face.any(axis=1))

    def test_scan_neighbors_are_close(self):
        # Consecutive samples along a ring sit centimeters apart; that
        # coherence is what the predictor feeds on.
        cloud = synth_cloud("corridor", 10000, noise_sigma=0.0, seed=8)
        steps = np.linalg.norm(np.diff(cloud.points, axis=0), axis=1)
        assert np.median(steps) < 0.2

    def test_intensity_channel(self):
        cloud = synth_cloud("plane", 300, seed=9, with_intensity=True)
        assert cloud.intensity.shape == (300,)
        assert np.all((cloud.intensity >= 0) & (cloud.intensity <= 1))

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            synth_cloud("torus", 10)

    def test_negative_count(self):
        with pytest.raises(ValidationError):
            synth_cloud("plane", -1)
