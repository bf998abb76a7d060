"""Exact CTQW search dynamics by diagonalization.

The search Hamiltonian is ``H = -|w><w| - gamma A``; the walk starts in the
uniform state ``s`` and ``P_w(t) = |<w| exp(-iHt) |s>|**2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .graph import Graph
from .spectral import (
    SpectralDecomposition,
    exact_rate,
    eig_sym,
    uniform_state,
)

DEFAULT_GRID = 2001
GOLDEN_ITERS = 60
REFINE_RTOL = 1e-6
RATE_KINDS = ("exact", "simplified", "resonant", "custom")


@dataclass(frozen=True)
class SearchSetup:
    graph: Graph
    gamma: float
    marked: int
    rate_kind: str = "custom"

    def __post_init__(self):
        if not 0 <= self.marked < self.graph.n:
            raise ValueError(f"marked vertex {self.marked} out of range for n={self.graph.n}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"transition rate must be positive and finite, got {self.gamma}")
        if self.rate_kind not in RATE_KINDS:
            raise ValueError(f"unknown rate kind {self.rate_kind!r}")


@dataclass(frozen=True)
class ComplexAmplitudes:
    real_part: np.ndarray
    imag_part: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return self.real_part**2 + self.imag_part**2

    def norm_squared(self) -> float:
        return float(np.sum(self.probabilities))

    def as_complex(self) -> np.ndarray:
        return self.real_part + 1j * self.imag_part


@dataclass
class EvolutionSeries:
    times: np.ndarray
    probabilities: np.ndarray
    t_star: float
    p_max: float
    meta: dict = field(default_factory=dict)

    def rescaled_times(self, scale: Optional[float] = None) -> np.ndarray:
        scale = self.times[-1] if scale is None else scale
        if scale == 0:
            return np.zeros_like(self.times)
        return self.times / scale

    def write_csv(self, destination, scale: Optional[float] = None, comments: Optional[dict] = None) -> None:
        """Columns ``t, t_rescaled, probability``; ``comments`` become ``# key: value`` lines."""
        rescaled = self.rescaled_times(scale)
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            for key, value in (comments or {}).items():
                fh.write(f"# {key}: {value}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "t_rescaled", "probability"])
            for t, tr, pr in zip(self.times.tolist(), rescaled.tolist(), self.probabilities.tolist()):
                writer.writerow([repr(t), repr(tr), repr(pr)])


def search_hamiltonian(graph: Graph, gamma: float, marked: int) -> np.ndarray:
    if not 0 <= marked < graph.n:
        raise ValueError(f"marked vertex {marked} out of range for n={graph.n}")
    h = -gamma * graph.as_float()
    h[marked, marked] -= 1.0
    return h


def evolve(decomp: SpectralDecomposition, initial, t: float) -> ComplexAmplitudes:
    """``exp(-iHt) |initial>`` from the eigenpairs of ``H``."""
    v = decomp.eigenvectors
    proj = v.T @ np.asarray(initial, dtype=np.float64)
    phase = decomp.eigenvalues * t
    return ComplexAmplitudes(v @ (np.cos(phase) * proj), -(v @ (np.sin(phase) * proj)))


def _marked_coefficients(decomp: SpectralDecomposition, initial, marked: int) -> np.ndarray:
    v = decomp.eigenvectors
    return v[marked, :] * (v.T @ np.asarray(initial, dtype=np.float64))


def _is_uniform(times: np.ndarray) -> bool:
    if times.size < 3:
        return False
    d = np.diff(times)
    return bool(np.allclose(d, d[0], rtol=1e-12, atol=0.0))


def _curve(theta, coeff, times: np.ndarray) -> np.ndarray:
    if _is_uniform(times):
        dt = (times[-1] - times[0]) / (times.size - 1)
        return kernels.probability_curve_uniform(theta, coeff, float(times[0]), float(dt), times.size)
    return kernels.probability_curve(theta, coeff, times)


def default_time_grid(n: int, size: int = DEFAULT_GRID) -> np.ndarray:
    return np.linspace(0.0, 2.0 * math.pi * math.sqrt(n), size)


def _decompose(setup: SearchSetup) -> SpectralDecomposition:
    return eig_sym(search_hamiltonian(setup.graph, setup.gamma, setup.marked))


def success_probability(setup: SearchSetup, times, decomp: SpectralDecomposition | None = None) -> np.ndarray:
    """``P_w(t)`` at arbitrary times (negative allowed)."""
    if decomp is None:
        decomp = _decompose(setup)
    coeff = _marked_coefficients(decomp, uniform_state(setup.graph.n), setup.marked)
    return _curve(decomp.eigenvalues, coeff, np.atleast_1d(np.asarray(times, dtype=np.float64)))


def _golden_max(f, lo: float, hi: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(GOLDEN_ITERS):
        if b - a <= REFINE_RTOL * max(abs(a), abs(b), 1.0):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _locate_max(theta, coeff, times: np.ndarray, probs: np.ndarray) -> tuple[float, float]:
    k = int(np.argmax(probs))
    best_t, best_p = float(times[k]), float(probs[k])
    lo = times[max(k - 1, 0)]
    hi = times[min(k + 1, times.size - 1)]
    if hi <= lo:
        return best_t, best_p

    def f(t):
        return float(kernels.probability_curve(theta, coeff, np.array([t]))[0])

    t, p = _golden_max(f, float(lo), float(hi))
    if p > best_p:
        return t, p
    return best_t, best_p


def probability_series(
    setup: SearchSetup,
    t_grid: Optional[Sequence[float]] = None,
    decomp: SpectralDecomposition | None = None,
) -> EvolutionSeries:
    """Success probability on ``t_grid`` (default: 2001 points on [0, 2 pi sqrt(n)]).

    ``t_star``/``p_max`` come from the grid argmax refined by golden-section
    search between its neighbours.
    """
    n = setup.graph.n
    times = default_time_grid(n) if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    if times.size == 0 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must start at 0 and be strictly increasing")
    if decomp is None:
        decomp = _decompose(setup)
    coeff = _marked_coefficients(decomp, uniform_state(n), setup.marked)
    probs = _curve(decomp.eigenvalues, coeff, times)
    t_star, p_max = _locate_max(decomp.eigenvalues, coeff, times, probs)
    return EvolutionSeries(times, probs, t_star, p_max, meta={"rate_kind": setup.rate_kind, "gamma": setup.gamma})


def two_level_prediction(n: int, t):
    """``sin**2(t / (2 sqrt(n)))``, the two-level success curve as usually quoted."""
    return np.sin(np.asarray(t, dtype=np.float64) / (2.0 * math.sqrt(n))) ** 2


def effective_two_level(state, marked: int, t):
    """Exact dynamics of ``H_eff = -|a><a| - |w><w|`` started in ``a``.

    With ``e = <w|a>`` the marked-vertex probability is
    ``e**2 cos**2(e t) + sin**2(e t)``; for ``e = 1/sqrt(n)`` this is close to
    ``sin**2(t / sqrt(n))``.
    """
    e = abs(float(np.asarray(state, dtype=np.float64)[marked]))
    et = e * np.asarray(t, dtype=np.float64)
    return e * e * np.cos(et) ** 2 + np.sin(et) ** 2


def optimal_time(
    setup: SearchSetup,
    decomp: SpectralDecomposition | None = None,
    grid_size: int = DEFAULT_GRID,
) -> tuple[float, float]:
    """Scan ``[0, 2 pi sqrt(n)]`` then refine the best grid point."""
    series = probability_series(setup, default_time_grid(setup.graph.n, grid_size), decomp)
    return series.t_star, series.p_max


@dataclass(frozen=True)
class DetuningPoint:
    delta: float
    gamma: float
    t_star: float
    p_max: float


def detuning_experiment(
    graph: Graph,
    marked: int,
    deltas: Iterable[float],
    grid_size: int = DEFAULT_GRID,
) -> list[DetuningPoint]:
    """Search quality under the rate ``gamma_exact * (1 + delta)``."""
    base = exact_rate(graph)
    grid = default_time_grid(graph.n, grid_size)
    out = []
    for delta in deltas:
        gamma = base * (1.0 + delta)
        kind = "exact" if delta == 0 else "custom"
        series = probability_series(SearchSetup(graph, gamma, marked, kind), grid)
        out.append(DetuningPoint(float(delta), gamma, series.t_star, series.p_max))
    return out


@dataclass(frozen=True)
class PhiReport:
    n: int
    f: int
    overlap: float
    expected_overlap: float
    tail_max_probability: dict
    baseline: float

    @property
    def tail_bound(self) -> float:
        return max(self.tail_max_probability.values())


def phi_state(n: int, f: int) -> np.ndarray:
    if not 0 < f < n:
        raise ValueError(f"tail size f must satisfy 0 < f < n, got f={f}, n={n}")
    phi = np.zeros(n)
    phi[: n - f] = 1.0 / math.sqrt(n - f)
    return phi


def phi_counterexample(n: int, f: int, times=None) -> tuple[np.ndarray, PhiReport]:
    """Uniform state on the first ``n - f`` vertices and its blind tail.

    ``phi`` is nearly parallel to ``s`` yet orthogonal to every tail vertex,
    so ``-|phi><phi| - |w><w|`` never moves amplitude onto a tail ``w``.
    """
    phi = phi_state(n, f)
    times = default_time_grid(n) if times is None else np.asarray(times, dtype=np.float64)
    tail = {w: float(np.max(effective_two_level(phi, w, times))) for w in range(n - f, n)}
    report = PhiReport(
        n=n,
        f=f,
        overlap=float(np.dot(uniform_state(n), phi)),
        expected_overlap=math.sqrt(1.0 - f / n),
        tail_max_probability=tail,
        baseline=1.0 / n,
    )
    return phi, report
