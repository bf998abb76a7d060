import numpy as np
import pytest

from qwsearch import _pykernels, kernels
from qwsearch.rng import uniform


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("n,p,seed", [(1, 0.5, 0), (2, 0.5, 3), (17, 0.3, 2**64 - 1), (120, 0.05, 99)])
def test_er_adjacency_follows_pair_stream(backend, n, p, seed):
    adj = backend.er_adjacency(n, p, seed)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            assert adj[i, j] == adj[j, i] == (uniform(seed, k) < p)
            k += 1
    assert not np.any(np.diagonal(adj))


def test_backends_agree_on_curves(backend):
    r = np.random.default_rng(5)
    theta = r.normal(size=300)
    coeff = r.normal(size=300) / 20
    times = np.linspace(0.0, 150.0, 1001)
    ref = _pykernels.probability_curve(theta, coeff, times)
    np.testing.assert_allclose(backend.probability_curve(theta, coeff, times), ref, rtol=0, atol=1e-12)
    uni = backend.probability_curve_uniform(theta, coeff, 0.0, times[1] - times[0], times.size)
    np.testing.assert_allclose(uni, ref, rtol=0, atol=1e-11)


def test_curve_direct_sum(backend):
    theta = np.array([0.3, -1.2, 2.0])
    coeff = np.array([0.5, 0.25, -0.1])
    t = np.array([0.0, 0.7, -3.1])
    expected = [abs(np.sum(coeff * np.exp(-1j * theta * x))) ** 2 for x in t]
    np.testing.assert_allclose(backend.probability_curve(theta, coeff, t), expected, atol=1e-15)
