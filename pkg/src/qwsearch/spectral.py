"""Symmetric eigendecomposition and the spectral quantities of ER search.

Scaled quantities use ``gamma_simple = 1/(n p)``; the centered matrix is
``A - p (J - I)`` with ``J`` the all-ones matrix.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple

import numpy as np

from .graph import Graph, is_connected

SYMMETRY_TOL = 1e-12
DEGENERACY_TOL = 1e-9
DEFAULT_C = 2.0
BETA_ZERO = 1e-14


class NotSymmetricError(ValueError):
    pass


class EigenConvergenceError(RuntimeError):
    pass


class DegenerateSpectrumError(ValueError):
    pass


class GraphSuitabilityError(ValueError):
    """Graph violates a precondition (disconnected, isolated vertex, no p)."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order; ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


@dataclass(frozen=True)
class RatePair:
    gamma_exact: float
    gamma_simple: float


class GoodVertexSet(NamedTuple):
    alpha: float
    beta: float
    vertices: np.ndarray


@dataclass(frozen=True)
class BoundsReport:
    n: int
    p: float
    epsilon: float
    lambda1_scaled: float
    lambda1_dev: float
    lambda1_bound_ok: bool
    opnorm_centered: float
    opnorm_ok: bool
    second_eig_max: float
    second_ok: bool
    overlap: float
    overlap_ok: bool
    nu: float
    alpha: float
    beta: float
    w_set_size: int

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_row(self) -> list:
        return [getattr(self, name) for name in self.field_names()]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(self.field_names())
        writer.writerow(self.csv_row())
        return buf.getvalue()


def _check_symmetric(matrix: np.ndarray) -> np.ndarray:
    a = np.asarray(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise NotSymmetricError(
            f"matrix is not symmetric (max asymmetry {np.max(np.abs(a - a.T)):.3e})"
        )
    return a


def _fix_signs(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    # first component with |v| > tol made positive
    first = np.argmax(np.abs(vectors) > tol, axis=0)
    signs = np.sign(vectors[first, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_sym(matrix) -> SpectralDecomposition:
    """Full eigendecomposition of a real symmetric matrix.

    Backed by LAPACK ``syevd`` (Householder tridiagonalization followed by
    divide and conquer) through :func:`numpy.linalg.eigh`. LAPACK's own QL/QR
    sweep cap (30 n iterations) applies; exceeding it raises
    :class:`EigenConvergenceError`.
    """
    a = _check_symmetric(matrix)
    try:
        vals, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"symmetric eigensolver did not converge: {exc}") from exc
    vals = vals[::-1].copy()
    vecs = _fix_signs(np.ascontiguousarray(vecs[:, ::-1]))
    return SpectralDecomposition(vals, vecs)


def eigvals_sym(matrix) -> np.ndarray:
    """Eigenvalues only, descending."""
    a = _check_symmetric(matrix)
    try:
        vals = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"symmetric eigensolver did not converge: {exc}") from exc
    return vals[::-1].copy()


def uniform_state(n: int) -> np.ndarray:
    return np.full(n, 1.0 / math.sqrt(n))


def principal_state(decomp: SpectralDecomposition) -> np.ndarray:
    """Top eigenvector, signed so that its overlap with the uniform state is >= 0."""
    vals = decomp.eigenvalues
    if vals.size > 1 and vals[0] - vals[1] < DEGENERACY_TOL:
        raise DegenerateSpectrumError(
            f"top eigenvalue is degenerate (gap {vals[0] - vals[1]:.3e}); "
            "the graph is unsuitable for search, typically because it is disconnected"
        )
    v = decomp.eigenvectors[:, 0].copy()
    if v.sum() < 0:
        v = -v
    return v


def _require_search_graph(graph: Graph) -> None:
    if graph.num_edges == 0 or not is_connected(graph):
        raise GraphSuitabilityError("search requires a connected graph with at least one edge")


def _require_p(graph: Graph) -> float:
    p = graph.p_nominal
    if p is None:
        raise GraphSuitabilityError(
            "graph carries no nominal edge probability (deterministic generator); pass p explicitly"
        )
    if not 0.0 < p <= 1.0:
        raise GraphSuitabilityError(f"nominal edge probability must lie in (0, 1], got {p}")
    return p


def exact_rate(graph: Graph, decomp: SpectralDecomposition | None = None) -> float:
    """``1 / lambda_1(A)``."""
    _require_search_graph(graph)
    lam1 = decomp.eigenvalues[0] if decomp is not None else eigvals_sym(graph.as_float())[0]
    if not lam1 > 0:
        raise GraphSuitabilityError(f"top adjacency eigenvalue must be positive, got {lam1}")
    return 1.0 / float(lam1)


def compute_rates(graph: Graph, p: float | None = None, decomp: SpectralDecomposition | None = None) -> RatePair:
    """``gamma_exact = 1/lambda_1(A)`` and ``gamma_simple = 1/(n p)``.

    ``p`` overrides the graph's nominal probability (needed for graphs built
    by deterministic generators).
    """
    gamma_exact = exact_rate(graph, decomp)
    if p is None:
        p = _require_p(graph)
    elif not 0.0 < p <= 1.0:
        raise GraphSuitabilityError(f"edge probability must lie in (0, 1], got {p}")
    return RatePair(gamma_exact, 1.0 / (graph.n * p))


def resonant_rate(decomp: SpectralDecomposition, marked: int) -> tuple[float, float]:
    """Second-order resonant rate for marking ``marked``, and its predicted search time.

    With ``lam_k`` the adjacency eigenvalues, ``r_k = lam_k / lam_1`` and
    ``e_k = <marked|v_k>``::

        S1 = sum_{k>=2} e_k**2 / (1 - r_k)
        S2 = sum_{k>=2} e_k**2 / (1 - r_k)**2
        gamma = S1 / lam_1
        T = pi / (2 |e_1|) * sqrt(S2) / S1

    ``gamma`` puts the marked vertex in resonance with the principal
    eigenvector once the coupling to the rest of the spectrum is accounted for.
    """
    vals = decomp.eigenvalues
    lam1 = vals[0]
    if vals.size > 1 and lam1 - vals[1] < DEGENERACY_TOL:
        raise DegenerateSpectrumError("top eigenvalue is degenerate")
    e = decomp.eigenvectors[marked, :]
    gap = 1.0 - vals[1:] / lam1
    s1 = float(np.sum(e[1:] ** 2 / gap))
    s2 = float(np.sum(e[1:] ** 2 / gap**2))
    t = math.pi / (2.0 * abs(e[0])) * math.sqrt(s2) / s1
    return s1 / lam1, t


def concentration_scale(n: int, p: float) -> float:
    """sqrt(ln n / (n p)), natural log."""
    return math.sqrt(math.log(n) / (n * p))


def good_vertex_set(s_prime, s=None) -> GoodVertexSet:
    """Split ``s_prime = alpha s + beta s_perp`` and collect the good vertices.

    A vertex ``w`` is good when ``|sqrt(n) s_prime[w] - alpha| <= sqrt(beta)``.
    When ``beta == 0`` every vertex is good. For ``beta > 0`` the complement
    always has fewer than ``beta * n`` elements.
    """
    v = np.asarray(s_prime, dtype=np.float64)
    n = v.size
    if s is None:
        s = uniform_state(n)
    alpha = float(np.dot(s, v))
    # norm of the s-orthogonal part; equals sqrt(1 - alpha**2) without its cancellation
    beta = float(np.linalg.norm(v - alpha * s))
    if beta <= BETA_ZERO:
        return GoodVertexSet(alpha, 0.0, np.arange(n))
    dev = np.abs(math.sqrt(n) * v - alpha)
    return GoodVertexSet(alpha, beta, np.flatnonzero(dev <= math.sqrt(beta)))


def bound_report(graph: Graph, C: float = DEFAULT_C, decomp: SpectralDecomposition | None = None) -> BoundsReport:
    """Evaluate every concentration inequality on one graph.

    ``decomp`` may carry a precomputed decomposition of the raw adjacency.
    """
    p = _require_p(graph)
    _require_search_graph(graph)
    n = graph.n
    gamma = 1.0 / (n * p)
    a = graph.as_float()
    if decomp is None:
        decomp = eig_sym(a)
    scaled = gamma * decomp.eigenvalues
    eps = concentration_scale(n, p)

    lam1 = float(scaled[0])
    dev = abs(lam1 - 1.0 + 1.0 / n)
    second = float(np.max(np.abs(scaled[1:]))) if n > 1 else 0.0

    centered = a - p
    centered[np.diag_indices(n)] = 0.0
    opnorm = float(gamma * np.max(np.abs(eigvals_sym(centered))))

    s_prime = principal_state(decomp)
    gvs = good_vertex_set(s_prime)
    overlap = gvs.alpha

    return BoundsReport(
        n=n,
        p=p,
        epsilon=eps,
        lambda1_scaled=lam1,
        lambda1_dev=dev,
        lambda1_bound_ok=bool(dev <= C * eps),
        opnorm_centered=opnorm,
        opnorm_ok=bool(opnorm <= math.sqrt(eps)),
        second_eig_max=second,
        second_ok=bool(second <= eps),
        overlap=overlap,
        overlap_ok=bool(overlap >= 1.0 - 2.0 / n - eps - math.sqrt(eps)),
        nu=lam1 - 1.0,
        alpha=gvs.alpha,
        beta=gvs.beta,
        w_set_size=int(gvs.vertices.size),
    )


def normalized_laplacian(graph: Graph) -> np.ndarray:
    """I - D^{-1/2} A D^{-1/2}."""
    deg = graph.degrees()
    if np.any(deg == 0):
        raise GraphSuitabilityError(
            f"normalized Laplacian needs no isolated vertices; vertex {int(np.argmin(deg))} has degree 0"
        )
    d = 1.0 / np.sqrt(deg)
    lap = -(d[:, None] * graph.as_float() * d[None, :])
    lap[np.diag_indices(graph.n)] += 1.0
    return lap


def h1_gap(graph: Graph, c: float) -> float:
    """Spectral gap ``mu_1 - max_{i>=2} |mu_i|`` of ``I - c * L``."""
    if not is_connected(graph):
        raise GraphSuitabilityError("spectral gap of I - cL requires a connected graph")
    lap = normalized_laplacian(graph)
    h1 = np.eye(graph.n) - c * lap
    mu = eigvals_sym(0.5 * (h1 + h1.T))
    if mu.size == 1:
        return float(mu[0])
    return float(mu[0] - np.max(np.abs(mu[1:])))
