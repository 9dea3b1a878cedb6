import pytest

import lizip
from corpus_helpers import corridor_points


@pytest.fixture(scope="session")
def corridor_corpus():
    """Training corpus: twenty corridor sweeps with 2 cm range noise."""
    return [corridor_points(seed, 3000) for seed in range(100, 120)]


@pytest.fixture(scope="session")
def held_out_clouds():
    """Corridor frames from seeds the corpus never saw."""
    return [
        lizip.synth_cloud("corridor", 4000, noise_sigma=0.02, seed=seed)
        for seed in (900, 901, 902, 903, 904)
    ]
