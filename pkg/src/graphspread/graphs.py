"""Weighted graphs with a probability measure on vertices, plus the shared
objective evaluators (variance, Lipschitz check, max-neighbor Rayleigh
quotient, vertex boundary).

Vertex probabilities are kept as exact fractions; float views are derived.
Edges are unit length throughout ("weighted" always refers to the measure).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for invalid graph construction or malformed graph files."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateValuationError(ValueError):
    """Raised when an objective needs positive variance but got none."""


def _to_fraction(value) -> Fraction:
    # floats convert to their exact binary value; strings like "1/3" or "0.25"
    # parse exactly.
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a probability")


@dataclass(frozen=True)
class WeightedGraph:
    """Connected undirected graph with positive vertex probabilities.

    pi entries must be positive (zero allowed when allow_zero_mass is set)
    and sum to 1: exactly for fraction inputs, within 1e-12 for float inputs
    (tiny drift is renormalized exactly).
    """

    n: int
    edges: tuple
    pi: tuple
    allow_zero_mass: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("vertex count must be >= 1")
        pi = tuple(_to_fraction(p) for p in self.pi)
        if len(pi) != self.n:
            raise GraphError(f"expected {self.n} probabilities, got {len(pi)}")
        for v, p in enumerate(pi):
            if p < 0 or (p == 0 and not self.allow_zero_mass):
                raise GraphError(f"pi_{v} must be positive")
        total = sum(pi)
        if total != 1:
            if abs(float(total) - 1.0) > 1e-12:
                raise GraphError(f"pi must sum to 1, got {float(total)}")
            pi = tuple(p / total for p in pi)
        norm_edges = []
        seen = set()
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) out of range")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            norm_edges.append((u, v))
        norm_edges.sort()
        nbrs = [[] for _ in range(self.n)]
        for u, v in norm_edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        if self.n > 1:
            reached = {0}
            queue = deque([0])
            while queue:
                u = queue.popleft()
                for w in nbrs[u]:
                    if w not in reached:
                        reached.add(w)
                        queue.append(w)
            if len(reached) != self.n:
                raise GraphError("graph is not connected")
        object.__setattr__(self, "edges", tuple(norm_edges))
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "_neighbors", tuple(tuple(sorted(a)) for a in nbrs))

    @property
    def neighbors(self) -> tuple:
        return self._neighbors

    def pi_float(self) -> np.ndarray:
        return np.array([float(p) for p in self.pi])

    def degree(self, v: int) -> int:
        return len(self._neighbors[v])


@dataclass(frozen=True)
class TreeGraph(WeightedGraph):
    """A tree with a designated root and parent pointers (parent[root] = -1)."""

    root: int = 0

    def __post_init__(self):
        super().__post_init__()
        if len(self.edges) != self.n - 1:
            raise GraphError(f"tree must have n-1 edges, got {len(self.edges)}")
        if not (0 <= self.root < self.n):
            raise GraphError(f"root {self.root} out of range")
        parent = [-1] * self.n
        order = [self.root]
        seen = {self.root}
        for u in order:
            for w in self.neighbors[u]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    order.append(w)
        object.__setattr__(self, "parent", tuple(parent))
        object.__setattr__(self, "bfs_order", tuple(order))

    @classmethod
    def from_graph(cls, g: WeightedGraph, root: int = 0) -> "TreeGraph":
        return cls(n=g.n, edges=g.edges, pi=g.pi,
                   allow_zero_mass=g.allow_zero_mass, root=root)


@dataclass(frozen=True)
class StarGraph(WeightedGraph):
    """A star: center at index 0, leaves 1..n-1, edges exactly {0,i}."""

    def __post_init__(self):
        super().__post_init__()
        want = tuple((0, i) for i in range(1, self.n))
        if self.edges != want:
            raise GraphError("star edges must be exactly {(0,i)}")

    @classmethod
    def from_masses(cls, pi: Sequence, allow_zero_mass: bool = False) -> "StarGraph":
        pi = tuple(pi)
        edges = tuple((0, i) for i in range(1, len(pi)))
        return cls(n=len(pi), edges=edges, pi=pi, allow_zero_mass=allow_zero_mass)

    @property
    def center_mass(self) -> Fraction:
        return self.pi[0]

    @property
    def leaf_masses(self) -> tuple:
        return self.pi[1:]


def as_star(g: WeightedGraph):
    """Detect a star shape under arbitrary vertex numbering.

    Returns (star, order) with order[star_index] = original index, or None if
    g is not a star. For n = 2 the lower-numbered vertex is the center.
    """
    if g.n < 2 or len(g.edges) != g.n - 1:
        return None
    degs = [g.degree(v) for v in range(g.n)]
    if g.n == 2:
        center = 0
    else:
        centers = [v for v in range(g.n) if degs[v] == g.n - 1]
        if not centers or any(degs[v] != 1 for v in range(g.n) if v != centers[0]):
            return None
        center = centers[0]
    order = [center] + [v for v in range(g.n) if v != center]
    pi = tuple(g.pi[v] for v in order)
    star = StarGraph.from_masses(pi, allow_zero_mass=g.allow_zero_mass)
    return star, tuple(order)


# ---------------------------------------------------------------------------
# graph file parsing
# ---------------------------------------------------------------------------

def parse_graph(text: str, allow_zero_mass: bool = False) -> WeightedGraph:
    """Parse the text graph format.

    Directives, one per line: `# comment`, `vertices <n>`, `pi <v> <value>`,
    `edge <u> <v>`. The vertices directive must come first; pi values may be
    fractions (p/q) or decimals and are kept exact. Errors carry 1-based line
    numbers; aggregate errors (pi sum, coverage, connectivity) anchor to the
    vertices line.
    """
    n = None
    vertices_line = None
    pi: dict = {}
    pi_lines: dict = {}
    edges = []
    edge_seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "vertices":
            if n is not None:
                raise GraphError("duplicate vertices directive", lineno)
            if len(parts) != 2:
                raise GraphError("expected: vertices <n>", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 1:
                raise GraphError("vertex count must be >= 1", lineno)
            vertices_line = lineno
            continue
        if n is None:
            raise GraphError("vertices directive must come first", lineno)
        if kind == "pi":
            if len(parts) != 3:
                raise GraphError("expected: pi <v> <value>", lineno)
            try:
                v = int(parts[1])
            except ValueError:
                raise GraphError(f"bad vertex index {parts[1]!r}", lineno) from None
            if not 0 <= v < n:
                raise GraphError(f"vertex {v} out of range", lineno)
            if v in pi:
                raise GraphError(f"duplicate pi for vertex {v}", lineno)
            try:
                value = Fraction(parts[2])
            except (ValueError, ZeroDivisionError):
                raise GraphError(f"bad probability {parts[2]!r}", lineno) from None
            if value < 0 or (value == 0 and not allow_zero_mass):
                raise GraphError("pi_v must be positive", lineno)
            pi[v] = value
            pi_lines[v] = lineno
        elif kind == "edge":
            if len(parts) != 3:
                raise GraphError("expected: edge <u> <v>", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphError("bad edge endpoints", lineno) from None
            if u == v:
                raise GraphError(f"self-loop at vertex {u}", lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range", lineno)
            key = (min(u, v), max(u, v))
            if key in edge_seen:
                raise GraphError(f"duplicate edge ({key[0]},{key[1]})", lineno)
            edge_seen.add(key)
            edges.append(key)
        else:
            raise GraphError(f"unknown directive {kind!r}", lineno)
    if n is None:
        raise GraphError("missing vertices directive", 1)
    missing = [v for v in range(n) if v not in pi]
    if missing:
        raise GraphError(f"missing pi for vertices {missing}", vertices_line)
    total = sum(pi.values())
    if total != 1 and abs(float(total) - 1.0) > 1e-12:
        raise GraphError(f"pi must sum to 1, got {total}", vertices_line)
    try:
        return WeightedGraph(n=n, edges=tuple(edges),
                             pi=tuple(pi[v] for v in range(n)),
                             allow_zero_mass=allow_zero_mass)
    except GraphError as exc:
        if exc.line is None:
            raise GraphError(str(exc), vertices_line) from None
        raise


def graph_to_text(g: WeightedGraph) -> str:
    lines = [f"vertices {g.n}"]
    for v, p in enumerate(g.pi):
        lines.append(f"pi {v} {p}")
    for u, v in g.edges:
        lines.append(f"edge {u} {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# objective evaluators
# ---------------------------------------------------------------------------

def _as_matrix(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("embedding must be an (n,) or (n,k) array")
    return arr


def variance(x, g: WeightedGraph) -> float:
    """Probability-weighted variance of an embedding (any dimension)."""
    arr = _as_matrix(x)
    if arr.shape[0] != g.n:
        raise ValueError(f"embedding has {arr.shape[0]} rows, graph has {g.n}")
    w = g.pi_float()
    mu = w @ arr
    diff = arr - mu
    return float(w @ np.einsum("ij,ij->i", diff, diff))


def variance_exact(x: Sequence, g: WeightedGraph) -> Fraction:
    """Exact variance of a 1-D rational valuation."""
    vals = [_to_fraction(v) for v in x]
    mean = sum(p * v for p, v in zip(g.pi, vals))
    return sum(p * (v - mean) ** 2 for p, v in zip(g.pi, vals))


def lipschitz_check(x, g: WeightedGraph, tol: float = 0.0):
    """Check every edge is stretched to at most 1 + tol.

    Returns (ok, worst_edge, worst_stretch); worst_edge is None for n = 1.
    """
    arr = _as_matrix(x)
    worst_edge = None
    worst = 0.0
    for u, v in g.edges:
        stretch = float(np.linalg.norm(arr[u] - arr[v]))
        if stretch > worst:
            worst = stretch
            worst_edge = (u, v)
    return worst <= 1.0 + tol, worst_edge, worst


def lambda_objective(x, g: WeightedGraph) -> float:
    """Rayleigh-type quotient: E_v max over neighbors of squared difference,
    divided by the variance. Shift and scale invariant; raises on zero
    variance."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("expects a 1-D valuation")
    var = variance(arr, g)
    if var <= 0.0:
        raise DegenerateValuationError("degenerate valuation")
    w = g.pi_float()
    num = 0.0
    for v in range(g.n):
        nbrs = g.neighbors[v]
        if not nbrs:
            continue
        best = max((arr[u] - arr[v]) ** 2 for u in nbrs)
        num += w[v] * best
    return num / var


def variance_delta(y, y2, blocks: Sequence[Sequence[int]], g: WeightedGraph) -> float:
    """Variance difference of two embeddings that are isometric within each
    block of a vertex partition, computed from block barycenters only:

        sum over block pairs of pi_A pi_B (||mu_A - mu_B||^2 - ||mu'_A - mu'_B||^2)

    Raises if some block's internal distances differ beyond 1e-9.
    """
    a = _as_matrix(y)
    b = _as_matrix(y2)
    if a.shape != b.shape or a.shape[0] != g.n:
        raise ValueError("embeddings must share shape (n,k)")
    seen = set()
    for block in blocks:
        for v in block:
            if v in seen:
                raise ValueError(f"vertex {v} in two blocks")
            seen.add(v)
    if seen != set(range(g.n)):
        raise ValueError("blocks must partition the vertex set")
    for block in blocks:
        block = list(block)
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                du = np.linalg.norm(a[block[i]] - a[block[j]])
                dv = np.linalg.norm(b[block[i]] - b[block[j]])
                if abs(du - dv) > 1e-9:
                    raise ValueError(
                        f"block containing {block[i]} is not isometric")
    w = g.pi_float()
    masses = []
    mu_a = []
    mu_b = []
    for block in blocks:
        idx = list(block)
        m = float(w[idx].sum())
        masses.append(m)
        if m > 0:
            mu_a.append(w[idx] @ a[idx] / m)
            mu_b.append(w[idx] @ b[idx] / m)
        else:
            mu_a.append(np.zeros(a.shape[1]))
            mu_b.append(np.zeros(a.shape[1]))
    delta = 0.0
    for i in range(len(masses)):
        for j in range(i + 1, len(masses)):
            da = mu_a[i] - mu_a[j]
            db = mu_b[i] - mu_b[j]
            delta += masses[i] * masses[j] * (float(da @ da) - float(db @ db))
    return delta


def vertex_boundary(S: Iterable[int], g: WeightedGraph) -> frozenset:
    """Symmetric vertex boundary: vertices with a neighbor on the other side
    of the cut (equivalently N(S) united with N(complement), external
    neighborhoods)."""
    S = frozenset(S)
    if not S or len(S) >= g.n or not all(0 <= v < g.n for v in S):
        raise ValueError("S must be a proper nonempty subset of the vertices")
    out = set()
    for v in range(g.n):
        inside = v in S
        if any((u in S) != inside for u in g.neighbors[v]):
            out.add(v)
    return frozenset(out)


def expansion_of_set(S: Iterable[int], g: WeightedGraph) -> Fraction:
    """Boundary mass over the smaller side's mass, as an exact fraction."""
    S = frozenset(S)
    boundary = vertex_boundary(S, g)
    mass_S = sum(g.pi[v] for v in S)
    mass_c = 1 - mass_S
    small = min(mass_S, mass_c)
    if small == 0:
        raise ZeroDivisionError("one side of the cut has zero mass")
    return sum(g.pi[v] for v in boundary) / small
