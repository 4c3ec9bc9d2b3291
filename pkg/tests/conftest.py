import numpy as np
import pytest

from sbpproj.spaces import LinearMap, Norm, Space


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_spd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return scale * (a @ a.T + n * np.eye(n))


def random_weighted_map(rng, m, n, rank=None):
    """Random map between random weighted spaces, optionally rank deficient."""
    dom = Space(n, Norm(random_spd(rng, n)))
    cod = Space(m, Norm(random_spd(rng, m)))
    if rank is None:
        mat = rng.standard_normal((m, n))
    else:
        mat = rng.standard_normal((m, rank)) @ rng.standard_normal((rank, n))
    return LinearMap(mat, dom, cod)
