"""Simple undirected graphs: generators, connectivity, edge-list I/O."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, TextIO, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import kernels
from .rng import MASK64

PathOrFile = Union[str, os.PathLike, TextIO]


class GraphFormatError(ValueError):
    """Malformed edge-list input; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    """Dense simple graph on vertices ``0..n-1``.

    ``p_nominal`` and ``seed`` are set only by random generators.
    The adjacency array is made read-only on construction.
    """

    n: int
    adjacency: np.ndarray = field(repr=False)
    p_nominal: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=np.uint8, copy=True)
        if self.n < 1:
            raise ValueError(f"vertex count must be positive, got {self.n}")
        if adj.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {adj.shape} does not match n={self.n}")
        if np.any(adj > 1):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(np.diagonal(adj)):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.int64)

    def as_float(self) -> np.ndarray:
        return self.adjacency.astype(np.float64)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.p_nominal == other.p_nominal
            and self.seed == other.seed
            and np.array_equal(self.adjacency, other.adjacency)
        )

    def __hash__(self):
        return hash((self.n, self.p_nominal, self.seed, self.adjacency.tobytes()))


def sample_er(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p).

    Pairs ``i < j`` are visited in row-major order; pair number ``k`` is an
    edge iff ``rng.uniform(seed, k) < p``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"edge probability must lie in [0, 1], got {p!r}")
    seed = int(seed) & MASK64
    adj = kernels.er_adjacency(int(n), float(p), seed)
    return Graph(n, adj, p_nominal=float(p), seed=seed)


def complete_graph(n: int) -> Graph:
    adj = np.ones((n, n), dtype=np.uint8)
    np.fill_diagonal(adj, 0)
    return Graph(n, adj)


def complete_bipartite(m: int, k: int) -> Graph:
    """K_{m,k}; vertices ``0..m-1`` form the first part."""
    if m < 1 or k < 1:
        raise ValueError(f"part sizes must be positive, got ({m}, {k})")
    adj = np.zeros((m + k, m + k), dtype=np.uint8)
    adj[:m, m:] = 1
    adj[m:, :m] = 1
    return Graph(m + k, adj)


def from_edges(n: int, edges, p_nominal=None, seed=None) -> Graph:
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1
    return Graph(n, adj, p_nominal=p_nominal, seed=seed)


def is_connected(graph: Graph) -> bool:
    if graph.n == 1:
        return True
    ncomp, _ = connected_components(graph.adjacency, directed=False)
    return ncomp == 1


def store_edge_list(graph: Graph, destination: PathOrFile) -> None:
    """Write ``n`` then one ``i j`` line per edge (``i < j``).

    Generation metadata, when present, follows the header as ``# key: value``
    comment lines, which :func:`load_edge_list` reads back.
    """
    lines = [str(graph.n)]
    if graph.p_nominal is not None:
        lines.append(f"# p_nominal: {graph.p_nominal!r}")
    if graph.seed is not None:
        lines.append(f"# seed: {graph.seed}")
    lines.extend(f"{i} {j}" for i, j in graph.edges())
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_edge_list(source: PathOrFile) -> Graph:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    return parse_edge_list(text)


def parse_edge_list(text: str) -> Graph:
    n = None
    meta = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            key = key.strip()
            if sep and key in ("p_nominal", "seed"):
                try:
                    meta[key] = float(value) if key == "p_nominal" else int(value)
                except ValueError:
                    raise GraphFormatError(lineno, f"bad {key} value {value.strip()!r}") from None
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise GraphFormatError(lineno, f"expected vertex count header, got {line!r}")
            try:
                n = int(parts[0])
            except ValueError:
                raise GraphFormatError(lineno, f"vertex count is not an integer: {line!r}") from None
            if n < 1:
                raise GraphFormatError(lineno, f"vertex count must be positive, got {n}")
            continue
        if len(parts) != 2:
            raise GraphFormatError(lineno, f"expected 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(lineno, f"vertex labels must be integers: {line!r}") from None
        for v in (i, j):
            if not 0 <= v < n:
                raise GraphFormatError(lineno, f"vertex {v} out of range for n={n}")
        if i == j:
            raise GraphFormatError(lineno, f"self-loop on vertex {i}")
        edge = (min(i, j), max(i, j))
        if edge in seen:
            raise GraphFormatError(lineno, f"duplicate edge {edge[0]} {edge[1]}")
        seen.add(edge)
    if n is None:
        raise GraphFormatError(1, "missing vertex count header")
    return from_edges(n, sorted(seen), **meta)
