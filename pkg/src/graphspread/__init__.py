"""Spread-type constants of weighted graphs: the max-neighbor Poincare
constant (lambda-infinity), the spread constant and its k-dimensional
maximum-variance generalizations, and vertex expansion; with exact small
oracles, polynomial tree algorithms, approximation schemes, balance-gadget
generators, and a randomized-projection rounding pipeline."""

from .graphs import (DegenerateValuationError, GraphError, StarGraph,
                     TreeGraph, WeightedGraph, as_star, expansion_of_set,
                     lambda_objective, lipschitz_check, parse_graph, variance,
                     variance_delta, variance_exact, vertex_boundary)
from .report import BudgetError, SolveReport

__all__ = [
    "BudgetError",
    "DegenerateValuationError",
    "GraphError",
    "SolveReport",
    "StarGraph",
    "TreeGraph",
    "WeightedGraph",
    "as_star",
    "expansion_of_set",
    "lambda_objective",
    "lipschitz_check",
    "parse_graph",
    "variance",
    "variance_delta",
    "variance_exact",
    "vertex_boundary",
]

__version__ = "0.1.0"
