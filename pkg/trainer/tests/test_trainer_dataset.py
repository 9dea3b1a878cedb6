"""Training pairs: context layout, targets, and corpus assembly."""

import warnings

import numpy as np
import pytest

import lizip
from liztrain import (
    FrameSource,
    ValidationError,
    build_training_set,
    frame_pairs,
    grid_sort,
)

from corpus_helpers import corridor_points, line_points


class TestFramePairs:
    def test_straight_line_gives_constant_targets(self):
        contexts, targets = frame_pairs(line_points(50, step=0.004), 3, 1000.0)
        assert targets.shape == (47, 3)
        expected = np.float32(4 / 1000.0)
        assert np.all(targets[:, 0] == expected)
        assert np.all(targets[:, 1:] == 0.0)

    def test_straight_line_context_layout(self):
        contexts, _ = frame_pairs(line_points(10, step=0.004), 3, 1000.0)
        expected = np.array(
            [-0.008, 0.0, 0.0, -0.004, 0.0, 0.0, 0.0, 0.0, 0.0], dtype=np.float32
        )
        assert np.array_equal(contexts[0], expected)
        assert np.array_equal(contexts[-1], expected)

    def test_last_context_block_is_always_zero(self):
        contexts, _ = frame_pairs(corridor_points(5, 400), 3, 1000.0)
        assert np.all(contexts[:, 6:9] == 0.0)

    def test_pair_count_is_n_minus_k(self):
        for n, k in ((10, 3), (100, 1), (7, 6)):
            contexts, targets = frame_pairs(corridor_points(2, n), k, 1000.0)
            assert contexts.shape == (n - k, 3 * k)
            assert targets.shape == (n - k, 3)

    def test_translation_invariance(self):
        rng = np.random.default_rng(21)
        base = rng.integers(0, 2000, size=(300, 3)).astype(np.float64) / 1000.0
        shifted = base + np.array([12.5, -3.25, 7.75])
        ctx_a, tgt_a = frame_pairs(base, 3, 1000.0)
        ctx_b, tgt_b = frame_pairs(shifted, 3, 1000.0)
        assert np.array_equal(ctx_a, ctx_b)
        assert np.array_equal(tgt_a, tgt_b)

    def test_contexts_match_codec_feature_vectors(self):
        points = corridor_points(9, 300)
        k, scale = 3, 1000.0
        contexts, _ = frame_pairs(points, k, scale)
        coords = grid_sort(points, scale).astype(np.int64)
        for t in (k, 57, 299):
            reference = lizip.build_context(coords[t - k : t], scale)
            assert contexts[t - k].dtype == reference.dtype == np.float32
            assert np.array_equal(contexts[t - k], reference)

    def test_targets_are_metric_offsets(self):
        points = corridor_points(3, 200)
        k, scale = 2, 100.0
        contexts, targets = frame_pairs(points, k, scale)
        coords = grid_sort(points, scale).astype(np.int64)
        expected = ((coords[k:] - coords[k - 1 : -1]) / scale).astype(np.float32)
        assert np.array_equal(targets, expected)

    def test_rejects_frame_shorter_than_context_plus_one(self):
        with pytest.raises(ValidationError, match="at least 4"):
            frame_pairs(line_points(3), 3, 1000.0)


class TestBuildTrainingSet:
    def test_concatenates_frames(self):
        frames = [corridor_points(s, 120) for s in (1, 2, 3)]
        contexts, targets = build_training_set(frames, 3, 1000.0)
        assert contexts.shape == (3 * 117, 9)
        assert targets.shape == (3 * 117, 3)
        first, _ = frame_pairs(frames[0], 3, 1000.0)
        assert np.array_equal(contexts[:117], first)

    def test_short_frames_are_skipped_with_warning(self):
        frames = [line_points(3), corridor_points(4, 100)]
        with pytest.warns(UserWarning, match="skipping frame 0"):
            contexts, targets = build_training_set(frames, 3, 1000.0)
        assert contexts.shape == (97, 9)

    def test_all_frames_short_gives_empty_arrays(self):
        with pytest.warns(UserWarning):
            contexts, targets = build_training_set([line_points(2)], 3, 1000.0)
        assert contexts.shape == (0, 9)
        assert targets.shape == (0, 3)
        assert contexts.dtype == targets.dtype == np.float32

    def test_long_frames_raise_no_warning(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            build_training_set([corridor_points(1, 50)], 3, 1000.0)

    def test_reads_frame_sources_from_disk(self, tmp_path):
        points = corridor_points(8, 150)
        path = tmp_path / "frame.bin"
        table = np.zeros((150, 4), dtype="<f4")
        table[:, :3] = points.astype(np.float32)
        path.write_bytes(table.tobytes())
        from_file = build_training_set([FrameSource(path)], 3, 1000.0)
        from_array = build_training_set([points.astype(np.float32).astype(np.float64)], 3, 1000.0)
        assert np.array_equal(from_file[0], from_array[0])
        assert np.array_equal(from_file[1], from_array[1])

    def test_rejects_bad_context_size(self):
        for k in (0, -1, 2.5):
            with pytest.raises(ValidationError, match="context size"):
                build_training_set([line_points(10)], k, 1000.0)

    def test_rejects_bad_scale(self):
        for scale in (0.0, -5.0, float("nan")):
            with pytest.raises(ValidationError, match="scale"):
                build_training_set([line_points(10)], 3, scale)
