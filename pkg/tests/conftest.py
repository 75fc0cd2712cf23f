from __future__ import annotations

import numpy as np
import pytest

from lognormal_kahler.dombrowski import TangentState
from lognormal_kahler.manifold import NaturalPoint


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_states(rng):
    def make(n):
        t1 = rng.uniform(-2.0, 2.0, n)
        t2 = rng.uniform(-3.0, -0.2, n)
        d = rng.uniform(-1.0, 1.0, (n, 2))
        return [TangentState(NaturalPoint(a, b), tuple(c)) for a, b, c in zip(t1, t2, d)]

    return make
