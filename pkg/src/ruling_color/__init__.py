"""Deterministic and randomized Δ-coloring in a simulated LOCAL model."""
from .graph import Graph, GraphFormatError, InfeasibleParams, Subgraph, gen_graph, load_graph
from .runtime import RoundCapExceeded, RoundLedger, VirtualGraph

__all__ = ["Graph", "GraphFormatError", "InfeasibleParams", "RoundCapExceeded", "RoundLedger", "Subgraph",
           "VirtualGraph", "gen_graph", "load_graph"]
__version__ = "0.1.0"
