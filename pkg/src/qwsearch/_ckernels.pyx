# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: ER pair sampler and spectral probability curves."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin
from libc.stdint cimport uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double INV53 = 1.0 / 9007199254740992.0
# exact re-anchoring interval of the phase recurrence
cdef Py_ssize_t ANCHOR = 64


cdef inline double _uniform(uint64_t seed, uint64_t k) nogil:
    cdef uint64_t z = seed + (k + 1) * GOLDEN
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    z = z ^ (z >> 31)
    return <double>(z >> 11) * INV53


def er_adjacency(Py_ssize_t n, double p, seed):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] adj = np.zeros((n, n), dtype=np.uint8)
    cdef unsigned char[:, ::1] a = adj
    cdef uint64_t s = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t k = 0
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                if _uniform(s, k) < p:
                    a[i, j] = 1
                    a[j, i] = 1
                k += 1
    return adj


def probability_curve(theta, coeff, times):
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(coeff, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(times, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0], m = t.shape[0], j, k
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double re, im, ph
    with nogil:
        for j in range(m):
            re = 0.0
            im = 0.0
            for k in range(n):
                ph = th[k] * t[j]
                re = re + c[k] * cos(ph)
                im = im - c[k] * sin(ph)
            o[j] = re * re + im * im
    return out


def probability_curve_uniform(theta, coeff, double t0, double dt, Py_ssize_t m):
    """Uniform grid t0 + j*dt via a per-mode phase recurrence.

    Each mode's phasor is recomputed exactly every ANCHOR steps, so rounding
    drift stays at ~ANCHOR ulps regardless of grid length.
    """
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(coeff, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0], j, k
    acc_re = np.zeros(m)
    acc_im = np.zeros(m)
    cdef double[::1] ar = acc_re
    cdef double[::1] ai = acc_im
    cdef double zr, zi, rr, ri, tmp, ph
    with nogil:
        for k in range(n):
            rr = cos(th[k] * dt)
            ri = -sin(th[k] * dt)
            zr = 0.0
            zi = 0.0
            for j in range(m):
                if j % ANCHOR == 0:
                    ph = th[k] * (t0 + j * dt)
                    zr = c[k] * cos(ph)
                    zi = -c[k] * sin(ph)
                ar[j] += zr
                ai[j] += zi
                tmp = zr * rr - zi * ri
                zi = zr * ri + zi * rr
                zr = tmp
    return acc_re * acc_re + acc_im * acc_im
