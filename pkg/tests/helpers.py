"""Shared instance generators for the test suites; all deterministic via
caller-provided random.Random instances."""

from fractions import Fraction
import random

from graphspread.graphs import StarGraph, TreeGraph, WeightedGraph


def rational_masses(rng: random.Random, n: int, max_part: int = 9,
                    min_part: int = 1):
    """n positive rational masses with common denominator sum(parts)."""
    parts = [rng.randint(min_part, max_part) for _ in range(n)]
    total = sum(parts)
    return tuple(Fraction(k, total) for k in parts)


def rand_star(rng: random.Random, n: int, **kw) -> StarGraph:
    return StarGraph.from_masses(rational_masses(rng, n, **kw))


def rand_tree_edges(rng: random.Random, n: int):
    """Uniform-ish random labeled tree: attach each vertex to an earlier one."""
    return tuple((rng.randrange(v), v) for v in range(1, n))


def rand_tree(rng: random.Random, n: int, **kw) -> TreeGraph:
    return TreeGraph(n=n, edges=rand_tree_edges(rng, n),
                     pi=rational_masses(rng, n, **kw))


def rand_connected_graph(rng: random.Random, n: int, extra: int = 2,
                         **kw) -> WeightedGraph:
    edges = set(tuple(sorted(e)) for e in rand_tree_edges(rng, n))
    candidates = [(u, v) for u in range(n) for v in range(u + 1, n)
                  if (u, v) not in edges]
    rng.shuffle(candidates)
    edges.update(candidates[:extra])
    return WeightedGraph(n=n, edges=tuple(sorted(edges)),
                         pi=rational_masses(rng, n, **kw))


def path_graph(n: int, pi=None) -> WeightedGraph:
    pi = pi or tuple(Fraction(1, n) for _ in range(n))
    return WeightedGraph(n=n, edges=tuple((i, i + 1) for i in range(n - 1)),
                         pi=tuple(pi))
