import numpy as np
import pytest

from efgsolve import build_game


@pytest.fixture(scope="session")
def games():
    """Compiled desk-scale games, shared across the whole session."""
    cache = {}

    def get(spec: str):
        if spec not in cache:
            cache[spec] = build_game(spec)
        return cache[spec]

    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
