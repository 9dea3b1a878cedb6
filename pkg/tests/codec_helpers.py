"""Model builders and paths shared across the codec test modules.

Lives in its own module (not conftest) so test files can import the
helpers by a name that stays unambiguous when other test trees are
collected in the same run.
"""

from pathlib import Path

import numpy as np

from lizip import mlp_model

FIXTURES = Path(__file__).parent / "fixtures"


def make_mlp(seed, dims=(9, 16, 16, 16, 3), weight_scale=0.5):
    """A deterministic random MLP over the given layer widths."""
    rng = np.random.default_rng(seed)
    layers = []
    for in_dim, out_dim in zip(dims, dims[1:]):
        layers.append(
            (
                rng.normal(0.0, weight_scale, (out_dim, in_dim)).astype(np.float32),
                rng.normal(0.0, 0.1, out_dim).astype(np.float32),
            )
        )
    return mlp_model(layers, dims[0] // 3)


def constant_mlp(values=(1.0, 2.0, 3.0), k=3):
    """Zero weights, so the output is just the bias: a constant offset."""
    w = np.zeros((3, 3 * k), dtype=np.float32)
    b = np.asarray(values, dtype=np.float32)
    return mlp_model([(w, b)], k)
