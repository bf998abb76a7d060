"""NumPy implementations of the hot kernels (fallback backend)."""

import numpy as np

from .rng import uniform_block

_CHUNK = 256


def er_adjacency(n, p, seed):
    adj = np.zeros((n, n), dtype=np.uint8)
    if n < 2:
        return adj
    iu, ju = np.triu_indices(n, 1)
    edges = uniform_block(seed, 0, iu.size) < p
    adj[iu[edges], ju[edges]] = 1
    adj[ju[edges], iu[edges]] = 1
    return adj


def probability_curve(theta, coeff, times):
    """|sum_k coeff_k exp(-i theta_k t)|**2 for each t in ``times``."""
    theta = np.asarray(theta, dtype=np.float64)
    coeff = np.asarray(coeff, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    out = np.empty(times.size)
    for lo in range(0, times.size, _CHUNK):
        phase = np.outer(times[lo:lo + _CHUNK], theta)
        re = np.cos(phase) @ coeff
        im = np.sin(phase) @ coeff
        out[lo:lo + _CHUNK] = re * re + im * im
    return out


def probability_curve_uniform(theta, coeff, t0, dt, m):
    return probability_curve(theta, coeff, t0 + dt * np.arange(m))
