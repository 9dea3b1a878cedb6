import pytest

from codec_helpers import FIXTURES, make_mlp


@pytest.fixture
def small_mlp():
    return make_mlp(20240)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
