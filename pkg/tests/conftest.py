import functools

import numpy as np
import pytest

from diamondlab import build_diamond, shortest_path_metric


@functools.lru_cache(maxsize=None)
def diamond(k):
    return build_diamond(k)


@functools.lru_cache(maxsize=None)
def diamond_metric(k):
    return shortest_path_metric(diamond(k))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_metric(rng, n):
    """Shortest-path closure of random positive weights on K_n."""
    w = rng.uniform(0.1, 1.0, size=(n, n))
    w = np.triu(w, 1)
    w = w + w.T
    for k in range(n):
        w = np.minimum(w, w[:, [k]] + w[[k], :])
    np.fill_diagonal(w, 0.0)
    return w
