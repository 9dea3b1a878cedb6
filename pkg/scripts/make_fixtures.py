"""Regenerate the binary test fixtures under tests/fixtures/.

Everything here is deterministic, so a rerun reproduces the committed
files byte for byte (the .lizip fixture additionally depends on the
entropy library's exact output and is treated as decode-stable, not
byte-stable, by the tests).
"""

from pathlib import Path

import numpy as np

from lizip import Backend, compress_cloud, mlp_model, synth_cloud, write_lizm

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def tiny_model():
    """[9 -> 4 -> 3], zero weights, output bias (1, 2, 3).

    The forward pass returns (1, 2, 3) for any context, which makes
    every downstream number checkable by hand.
    """
    layers = [
        (np.zeros((4, 9), dtype=np.float32), np.zeros(4, dtype=np.float32)),
        (np.zeros((3, 4), dtype=np.float32), np.array([1.0, 2.0, 3.0], dtype=np.float32)),
    ]
    return mlp_model(layers, context_size=3)


def latency_model():
    """A mid-size random network for timing runs: [9, 64, 64, 64, 3]."""
    rng = np.random.default_rng(20240)
    dims = [9, 64, 64, 64, 3]
    layers = []
    for index in range(len(dims) - 1):
        fan_in = dims[index]
        w = rng.normal(0.0, 0.5 / np.sqrt(fan_in), (dims[index + 1], fan_in))
        b = rng.normal(0.0, 0.01, dims[index + 1])
        layers.append((w.astype(np.float32), b.astype(np.float32)))
    return mlp_model(layers, context_size=3)


def golden_container():
    """A small lzma container with intensity, several blocks."""
    cloud = synth_cloud("corridor", 2000, noise_sigma=0.02, seed=123, with_intensity=True)
    return compress_cloud(cloud, 1e3, backend=Backend.LZMA, block_size=600)


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_lizm(tiny_model(), FIXTURES / "tiny.lizm")
    write_lizm(latency_model(), FIXTURES / "latency.lizm")
    (FIXTURES / "golden.lizip").write_bytes(golden_container())
    for path in sorted(FIXTURES.iterdir()):
        print(f"{path.name}: {path.stat().st_size} bytes")


if __name__ == "__main__":
    main()
