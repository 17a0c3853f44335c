"""Two-dimensional maximum-variance embeddings of trees, a Gram-matrix lift
heuristic for general graphs, and Gaussian/PCA rounding of lifts.

The tree solver is combinatorial and exact: the optimal barycenter sits on a
vertex (case i) or strictly inside an edge (case ii), and exactly one case is
feasible. The lift solver is a penalized projected gradient method; it carries
no optimality certificate and is checked against the tree solver where one
exists.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .embeddings import embedding_from_dict, embedding_to_dict
from .graphs import TreeGraph, WeightedGraph, variance
from .report import SolveReport

__all__ = [
    "BranchMoments",
    "GramLift",
    "RoundingReport",
    "TrialSummary",
    "branch_moments",
    "tree_mve2_value",
    "tree_mve2_embed",
    "lift_solve",
    "tau_k",
    "gaussian_round",
    "gaussian_trials",
    "pca_round",
]

# hook for the self-test mutation harness; always math.log in production
_TAU_LOG = math.log


# ---------------------------------------------------------------------------
# branch moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchMoments:
    """Per vertex, one entry per incident branch: the neighbor the branch
    hangs through, its probability mass, and its first distance moment."""

    via: tuple     # via[v] = tuple of neighbor ids
    mass: tuple    # mass[v][i] = pi-mass of branch via[v][i]
    moment: tuple  # moment[v][i] = sum over branch of pi_u * d(v, u)

    def at(self, v: int) -> List[Tuple[int, Fraction, Fraction]]:
        return list(zip(self.via[v], self.mass[v], self.moment[v]))


def branch_moments(t: TreeGraph) -> BranchMoments:
    """Masses and first moments of every branch at every vertex, O(n).

    Post-order pass: subtree masses and moments toward each vertex.
    Pre-order pass: the parent-side branch, reusing the root totals.
    """
    n = t.n
    sub_mass = [Fraction(0)] * n   # mass of subtree(v), incl. v
    sub_mom = [Fraction(0)] * n    # sum over subtree(v) of pi_u d(v,u)
    for v in reversed(t.bfs_order):
        sub_mass[v] += t.pi[v]
        p = t.parent[v]
        if p >= 0:
            sub_mass[p] += sub_mass[v]
            sub_mom[p] += sub_mom[v] + sub_mass[v]
    up_mom = [Fraction(0)] * n     # sum over V minus subtree(v) of pi_u d(v,u)
    for v in t.bfs_order:
        p = t.parent[v]
        if p >= 0:
            up_mom[v] = (up_mom[p] + sub_mom[p] - (sub_mom[v] + sub_mass[v])
                         + 1 - sub_mass[v])

    via, mass, moment = [], [], []
    for v in range(n):
        vs, ms, mos = [], [], []
        for w in t.neighbors[v]:
            vs.append(w)
            if t.parent[w] == v:       # child branch
                ms.append(sub_mass[w])
                mos.append(sub_mom[w] + sub_mass[w])
            else:                      # parent side
                ms.append(1 - sub_mass[v])
                mos.append(up_mom[v])
        via.append(tuple(vs))
        mass.append(tuple(ms))
        moment.append(tuple(mos))
    return BranchMoments(via=tuple(via), mass=tuple(mass), moment=tuple(moment))


# ---------------------------------------------------------------------------
# exact 2-D tree solver
# ---------------------------------------------------------------------------

def _distances_from(t: TreeGraph, v: int) -> List[int]:
    dist = [-1] * t.n
    dist[v] = 0
    q = deque([v])
    while q:
        u = q.popleft()
        for w in t.neighbors[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def _side_of(t: TreeGraph, keep: int, drop: int) -> List[int]:
    """Vertices on keep's side when edge (keep, drop) is removed."""
    side = [keep]
    seen = {keep, drop}
    q = deque([keep])
    while q:
        u = q.popleft()
        for w in t.neighbors[u]:
            if w not in seen:
                seen.add(w)
                side.append(w)
                q.append(w)
    return side


def tree_mve2_value(t: TreeGraph) -> SolveReport:
    """Exact 2-D maximum embedding variance of a tree.

    Scans the n vertex cases (barycenter on a vertex v, feasible iff
    2 max_b M_b <= sum_b M_b) and the n-1 edge cases (barycenter strictly
    inside an edge at offset alpha = (pi2 + M2 - M1)/(pi1 + pi2)).  Exactly
    one case is feasible; its fully stretched second moment is the value.
    """
    if t.n < 2:
        raise ValueError("need n >= 2")
    bm = branch_moments(t)
    feasible = []  # (kind, where, value, alpha or None)

    for v in range(t.n):
        moments = bm.moment[v]
        if 2 * max(moments) <= sum(moments):
            dist = _distances_from(t, v)
            value = sum((t.pi[u] * dist[u] * dist[u] for u in range(t.n)),
                        Fraction(0))
            feasible.append(("vertex", v, value, None))

    for (a, b) in t.edges:
        ia = bm.via[a].index(b)
        pi2, m2 = bm.mass[a][ia], bm.moment[a][ia]   # b's side, from b
        m2 -= pi2                                    # moment was measured from a
        pi1 = 1 - pi2
        ib = bm.via[b].index(a)
        m1 = bm.moment[b][ib] - pi1                  # a's side, from a
        alpha = (pi2 + m2 - m1) / (pi1 + pi2)
        if not (0 < alpha < 1):
            continue
        value = Fraction(0)
        for keep, drop, off in ((a, b, alpha), (b, a, 1 - alpha)):
            dist = _distances_from(t, keep)
            for u in _side_of(t, keep, drop):
                value += t.pi[u] * (dist[u] + off) ** 2
        feasible.append(("edge", (a, b), value, alpha))

    if len(feasible) != 1:
        raise ValueError(f"expected exactly one feasible barycenter case, "
                         f"found {len(feasible)}")
    kind, where, value, alpha = feasible[0]
    diag = {"case": kind, "location": where, "feasible_cases": 1}
    if alpha is not None:
        diag["alpha"] = str(alpha)
    return SolveReport.exact(value, **diag)


def _three_groups(values: Sequence[float]):
    """Greedy descending split into three groups, filling the lightest.
    Returns (group index per value, group sums)."""
    order = sorted(range(len(values)), key=lambda i: -values[i])
    sums = [0.0, 0.0, 0.0]
    assign = [0] * len(values)
    for i in order:
        g = min(range(3), key=lambda j: sums[j])
        assign[i] = g
        sums[g] += values[i]
    return assign, sums


def tree_mve2_embed(t: TreeGraph) -> np.ndarray:
    """A 2-D unit-Lipschitz embedding attaining tree_mve2_value.

    Case (i): branches are laid on three rays whose weighted directions
    cancel; the ray angles come from the triangle with side lengths equal to
    the group sums (law of cosines).  Case (ii): the whole tree goes on a
    line through the feasible edge.
    """
    rep = tree_mve2_value(t)
    n = t.n
    x = np.zeros((n, 2))
    if rep.diagnostics["case"] == "edge":
        a, b = rep.diagnostics["location"]
        alpha = float(Fraction(rep.diagnostics["alpha"]))
        dist_a = _distances_from(t, a)
        dist_b = _distances_from(t, b)
        for u in _side_of(t, a, b):
            x[u, 0] = -(dist_a[u] + alpha)
        for u in _side_of(t, b, a):
            x[u, 0] = dist_b[u] + (1 - alpha)
        return x

    v = rep.diagnostics["location"]
    bm = branch_moments(t)
    moments = [float(m) for m in bm.moment[v]]
    assign, sums = _three_groups(moments)
    A, B, C = sums
    assert A <= B + C + 1e-12, "grouping must satisfy the triangle inequality"
    dirs = np.zeros((3, 2))
    if A > 0:
        dirs[0] = (1.0, 0.0)
        if B > 0:
            cos_ab = (C * C - A * A - B * B) / (2 * A * B)
            cos_ab = min(1.0, max(-1.0, cos_ab))
            sin_ab = math.sqrt(max(0.0, 1 - cos_ab * cos_ab))
            dirs[1] = (cos_ab, sin_ab)
        if C > 0:
            dirs[2] = -(A * dirs[0] + B * dirs[1]) / C
    # weightless groups keep arbitrary fixed rays; they carry no mass
    for g in range(3):
        if np.allclose(dirs[g], 0):
            dirs[g] = (1.0, 0.0)

    dist = _distances_from(t, v)
    group_of_branch = dict(zip(bm.via[v], assign))
    for w in t.neighbors[v]:
        ray = dirs[group_of_branch[w]]
        for u in _side_of(t, w, v):
            x[u] = dist[u] * ray
    return x


# ---------------------------------------------------------------------------
# Gram lift
# ---------------------------------------------------------------------------

@dataclass
class GramLift:
    """PSD Gram matrix of vertex vectors with unit edge length caps."""

    graph: WeightedGraph
    X: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def objective(self) -> float:
        """Embedding variance encoded by the Gram matrix."""
        p = self.graph.pi_float()
        return float(np.dot(p, np.diag(self.X)) - p @ self.X @ p)

    def edge_excess(self) -> float:
        worst = 0.0
        for u, v in self.graph.edges:
            q = self.X[u, u] + self.X[v, v] - 2 * self.X[u, v]
            worst = max(worst, q - 1.0)
        return worst

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.X + self.X.T) / 2)[0])

    def is_feasible(self, tol: float = 1e-8) -> bool:
        return self.min_eigenvalue() >= -tol and self.edge_excess() <= tol

    def factors(self) -> np.ndarray:
        """Rows are vertex vectors x_v with X = x xᵀ (up to clipped noise)."""
        w, V = np.linalg.eigh((self.X + self.X.T) / 2)
        w = np.clip(w, 0.0, None)
        return V * np.sqrt(w)

    def to_dict(self) -> dict:
        return embedding_to_dict(self.factors())

    @classmethod
    def from_dict(cls, graph: WeightedGraph, d: dict) -> "GramLift":
        vec = embedding_from_dict(d)
        if vec.shape[0] != graph.n:
            raise ValueError(f"lift has {vec.shape[0]} rows, graph has {graph.n}")
        return cls(graph=graph, X=vec @ vec.T)


def _psd_clip(X: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh((X + X.T) / 2)
    w = np.clip(w, 0.0, None)
    return (V * w) @ V.T


def _bfs_profile(g: WeightedGraph, v: int):
    """Distances from v plus the components of g minus v with their
    first distance moments."""
    n = g.n
    p = g.pi_float()
    dist = [-1] * n
    dist[v] = 0
    q = deque([v])
    while q:
        u = q.popleft()
        for w in g.neighbors[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    comp = [-1] * n
    ncomp = 0
    for s in range(n):
        if s == v or comp[s] >= 0:
            continue
        stack = [s]
        comp[s] = ncomp
        while stack:
            a = stack.pop()
            for w in g.neighbors[a]:
                if w != v and comp[w] < 0:
                    comp[w] = ncomp
                    stack.append(w)
        ncomp += 1
    mom = [0.0] * ncomp
    for u in range(n):
        if u != v:
            mom[comp[u]] += p[u] * dist[u]
    return dist, comp, mom


def _lift_inits(g: WeightedGraph) -> List[np.ndarray]:
    """Feasible starting Grams: scaled identity, the best signed line
    profile, a scaled spectral profile, and up to three multi-ray layouts.

    The multi-ray layout puts each component of g minus a center vertex on
    one of three rays whose moment-weighted directions cancel (same triangle
    construction as the exact tree embedder, but driven by BFS distances, so
    it is feasible on any connected graph)."""
    n = g.n
    p = g.pi_float()
    inits = [np.eye(n) / 2]

    line_best, line_var = None, -1.0
    ray_cands = []  # (var, Gram)
    for v in range(n):
        dist, comp, mom = _bfs_profile(g, v)
        ncomp = len(mom)

        order = sorted(range(ncomp), key=lambda c: -mom[c])
        sign = [1.0] * ncomp
        run = 0.0
        for c in order:
            sign[c] = -1.0 if run > 0 else 1.0
            run += sign[c] * mom[c]
        y = np.array([0.0 if u == v else sign[comp[u]] * dist[u]
                      for u in range(n)])
        var = float(p @ y ** 2 - (p @ y) ** 2)
        if var > line_var:
            line_var, line_best = var, y

        if ncomp >= 2 and 2 * max(mom) <= sum(mom):
            assign, sums = _three_groups(mom)
            A, B, C3 = sums
            dirs = np.zeros((3, 2))
            dirs[0] = (1.0, 0.0)
            if A > 0 and B > 0:
                c_ab = min(1.0, max(-1.0, (C3 * C3 - A * A - B * B) / (2 * A * B)))
                dirs[1] = (c_ab, math.sqrt(max(0.0, 1 - c_ab * c_ab)))
            if C3 > 0:
                dirs[2] = -(A * dirs[0] + B * dirs[1]) / C3
            pts = np.zeros((n, 2))
            for u in range(n):
                if u != v:
                    pts[u] = dist[u] * dirs[assign[comp[u]]]
            var2 = variance(pts, g)
            ray_cands.append((var2, pts @ pts.T))

    inits.append(np.outer(line_best, line_best))
    ray_cands.sort(key=lambda t: -t[0])
    inits.extend(X for _, X in ray_cands[:3])

    C = np.diag(p) - np.outer(p, p)
    _, V = np.linalg.eigh(C)
    z = V[:, -1]
    stretch = max(abs(z[u] - z[v]) for u, v in g.edges)
    if stretch > 0:
        inits.append(np.outer(z / stretch, z / stretch))
    return inits


def lift_solve(g: WeightedGraph, tol: float = 1e-6,
               max_iters: int = 20000) -> GramLift:
    """Heuristic maximizer of embedding variance over unit-edge Gram lifts.

    Projected gradient ascent with augmented Lagrangian multipliers on the
    edge caps: ascend <C, X> minus the multiplier forces, clip eigenvalues
    to stay PSD, and update the multipliers between rounds.  Every round a
    feasible rescale of the iterate (divide by the worst edge form) is
    recorded, and the best such point over all starting Grams is returned,
    so the output is feasible regardless of convergence; failing to settle
    within the iteration budget only clears the converged flag.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = g.n
    p = g.pi_float()
    C = np.diag(p) - np.outer(p, p)
    eu = np.array([e[0] for e in g.edges])
    ev = np.array([e[1] for e in g.edges])

    def objective(X):
        return float(p @ np.diag(X) - p @ X @ p)

    def forms(X):
        return X[eu, eu] + X[ev, ev] - 2 * X[eu, ev]

    best_X, best_obj = None, -1.0

    def consider(X):
        nonlocal best_X, best_obj
        scale = max(1.0, forms(X).max())
        o = objective(X) / scale
        if o > best_obj:
            best_X, best_obj = X / scale, o

    rho = 50.0
    eta = 0.9 / (1.0 + 8.0 * rho)
    inner = 200
    inits = _lift_inits(g)
    budget = max(1, max_iters // (inner * len(inits)))

    iters_used = 0
    converged = False
    for X0 in inits:
        X = _psd_clip(np.array(X0, dtype=float))
        consider(X)
        lam = np.zeros(len(eu))
        settled = 0
        last = objective(X) / max(1.0, forms(X).max())
        for _ in range(budget):
            vel = np.zeros_like(X)
            for _ in range(inner):
                iters_used += 1
                force = np.maximum(0.0, lam + rho * (forms(X) - 1.0))
                grad = C.copy()
                np.add.at(grad, (eu, eu), -force)
                np.add.at(grad, (ev, ev), -force)
                np.add.at(grad, (eu, ev), force)
                np.add.at(grad, (ev, eu), force)
                vel = 0.85 * vel + eta * grad
                X = _psd_clip(X + vel)
            consider(X)
            lam = np.maximum(0.0, lam + rho * (forms(X) - 1.0))
            o = objective(X) / max(1.0, forms(X).max())
            if abs(o - last) <= tol * max(1.0, abs(o)):
                settled += 1
                if settled >= 2:
                    break
            else:
                settled = 0
            last = o
        if settled >= 2:
            converged = True

    lift = GramLift(graph=g, X=best_X)
    lift.diagnostics.update(converged=converged, iterations=iters_used,
                            objective=best_obj)
    return lift


# ---------------------------------------------------------------------------
# rounding
# ---------------------------------------------------------------------------

def tau_k(k: int, n: int) -> float:
    """Scaling divisor k + 2*sqrt(3k ln n) + 6 ln n of the Gaussian rounding."""
    ln = _TAU_LOG(n)
    return k + 2.0 * math.sqrt(3.0 * k * ln) + 6.0 * ln


@dataclass(frozen=True)
class RoundingReport:
    k: int
    tau: float
    var_ratio: float        # Var(y) / Var(x)
    violations: int         # edges with unscaled image longer than sqrt(tau)
    lipschitz_ok: bool      # no violated edge after scaling
    variance_ok: bool       # Var(y) >= (k / (2 tau)) Var(x)


def gaussian_round(lift: GramLift, k: int, seed: int):
    """Random k-dim projection y_u = G x_u / sqrt(tau_k) of the lift.

    G has k independent standard normal rows; deterministic given seed.
    Returns (embedding, report).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = lift.graph
    x = lift.factors()
    tau = tau_k(k, g.n)
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((k, x.shape[1]))
    y = (x @ G.T) / math.sqrt(tau)

    violations = 0
    for u, v in g.edges:
        d2 = float(np.sum((y[u] - y[v]) ** 2))
        if d2 > 1.0 + 1e-12:
            violations += 1
    var_x = lift.objective()
    var_y = variance(y, g)
    ratio = var_y / var_x if var_x > 0 else 0.0
    report = RoundingReport(
        k=k, tau=tau, var_ratio=ratio, violations=violations,
        lipschitz_ok=(violations == 0),
        variance_ok=(var_y >= (k / (2.0 * tau)) * var_x - 1e-15),
    )
    return y, report


@dataclass
class TrialSummary:
    trials: int
    k: int
    tau: float
    violation_rate: float      # fraction of seeds with >= 1 violated edge
    variance_rate: float       # fraction of seeds passing the variance event
    pair_mean: np.ndarray      # mean over seeds of ||G x_u - G x_v||^2
    pair_se: np.ndarray        # standard error of that mean
    pair_truth: np.ndarray     # k ||x_u - x_v||^2


def gaussian_trials(lift: GramLift, k: int, trials: int,
                    base_seed: int = 0) -> TrialSummary:
    """Aggregate gaussian_round over seeds base_seed..base_seed+trials-1."""
    g = lift.graph
    x = lift.factors()
    n = g.n
    tau = tau_k(k, n)
    gram = x @ x.T
    sq = np.diag(gram)
    truth = k * (sq[:, None] + sq[None, :] - 2 * gram)

    total = np.zeros((n, n))
    total_sq = np.zeros((n, n))
    viol = 0
    var_ok = 0
    for t in range(trials):
        y, rep = gaussian_round(lift, k, base_seed + t)
        z = y * math.sqrt(tau)   # undo scaling: z_u = G x_u
        zz = z @ z.T
        d2 = np.diag(zz)[:, None] + np.diag(zz)[None, :] - 2 * zz
        total += d2
        total_sq += d2 ** 2
        viol += 0 if rep.lipschitz_ok else 1
        var_ok += 1 if rep.variance_ok else 0
    mean = total / trials
    var = np.maximum(total_sq / trials - mean ** 2, 0.0)
    se = np.sqrt(var / trials)
    return TrialSummary(trials=trials, k=k, tau=tau,
                        violation_rate=viol / trials,
                        variance_rate=var_ok / trials,
                        pair_mean=mean, pair_se=se, pair_truth=truth)


def pca_round(lift: GramLift, k: int) -> np.ndarray:
    """Project the lift onto its top-k weighted principal directions.

    Centering and the covariance use the vertex distribution. Projection
    never stretches an edge, so rescaling only guards numerical fuzz.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = lift.graph
    x = lift.factors()
    p = g.pi_float()
    z = x - p @ x
    cov = z.T @ (z * p[:, None])
    _, V = np.linalg.eigh(cov)
    y = z @ V[:, -k:]

    worst = 0.0
    for u, v in g.edges:
        worst = max(worst, float(np.sum((y[u] - y[v]) ** 2)))
    if worst > 1.0:
        y = y / math.sqrt(worst)
    return y
