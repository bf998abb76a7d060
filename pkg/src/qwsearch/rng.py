"""Counter-based SplitMix64 streams and seed derivation.

Every random quantity in the package is a pure function of a 64-bit seed and a
counter, so streams can be reproduced in any language:

    z = (seed + (k + 1) * 0x9E3779B97F4A7C15) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    z = z ^ (z >> 31)
    u = (z >> 11) * 2**-53            # uniform on [0, 1)

``uniform(seed, k)`` is the k-th draw (k = 0, 1, ...). This is exactly the
k-th output of the reference SplitMix64 generator started at state ``seed``.

Child seeds are derived by folding keys into the base seed::

    h = base
    for key in keys:
        h = mix64(h ^ mix64(key + 0x9E3779B97F4A7C15))

where ``mix64`` is the three finalizer lines above applied to its argument.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)

#: key mixed into a trial seed to get the marked-vertex stream
MARK_TAG = 0x6D61726B


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def next_u64(seed: int, k: int) -> int:
    return mix64((seed + (k + 1) * GOLDEN) & MASK64)


def uniform(seed: int, k: int) -> float:
    """k-th uniform draw on [0, 1) of the stream ``seed``."""
    return (next_u64(seed, k) >> 11) * _INV53


def uniform_block(seed: int, start: int, count: int) -> np.ndarray:
    """Draws ``start .. start+count-1`` of the stream, vectorized."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + k * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV53


def derive_seed(base: int, *keys: int) -> int:
    """Fold integer keys into ``base``; order-sensitive, execution-order free."""
    h = base & MASK64
    for key in keys:
        h = mix64(h ^ mix64((int(key) + GOLDEN) & MASK64))
    return h


def randbelow(seed: int, n: int, k: int = 0) -> int:
    """Integer in ``[0, n)`` from draw ``k`` of the stream."""
    return min(int(uniform(seed, k) * n), n - 1)
