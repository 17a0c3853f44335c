"""Shared bits for the demo scripts."""

import random
from fractions import Fraction

from graphspread.graphs import TreeGraph


def random_tree(rng: random.Random, n: int, max_part: int = 9) -> TreeGraph:
    """Random attachment tree with random positive rational masses."""
    edges = tuple((rng.randrange(v), v) for v in range(1, n))
    parts = [rng.randint(1, max_part) for _ in range(n)]
    total = sum(parts)
    pi = tuple(Fraction(p, total) for p in parts)
    return TreeGraph(n=n, edges=edges, pi=pi)
