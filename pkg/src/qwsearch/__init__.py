"""CTQW spatial search on Erdos-Renyi graphs."""

from .graph import (
    Graph,
    GraphFormatError,
    complete_bipartite,
    complete_graph,
    is_connected,
    load_edge_list,
    sample_er,
    store_edge_list,
)
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "Graph",
    "GraphFormatError",
    "complete_bipartite",
    "complete_graph",
    "is_connected",
    "load_edge_list",
    "sample_er",
    "store_edge_list",
]
__version__ = "0.1.0"
