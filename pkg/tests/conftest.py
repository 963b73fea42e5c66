import numpy as np
import pytest

from hypervis import hypgeom
from hypervis.rng import stream


@pytest.fixture
def rng():
    return stream(20240917)


def ks_statistic(samples, cdf):
    """Sup distance between the empirical CDF of samples and a model CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    f = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def random_point(d, rng, r_max=3.0):
    """Random hyperboloid point within distance r_max of the base point."""
    t = rng.uniform(0.0, r_max)
    u = np.zeros(d + 1)
    g = rng.standard_normal(d)
    u[1:] = g / np.linalg.norm(g)
    return hypgeom.exp_map(hypgeom.base_point(d), u, t)


def random_rotation(d, rng):
    """Haar-random d x d rotation matrix."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))
