"""Vertex expansion solvers: exhaustive minimum over cuts, a counting DP for
uniform trees, and an exact subset-sum solver for weighted stars.

Boundary convention everywhere: a vertex is on the boundary of a cut when it
is an endpoint of a cut edge (the union of both sides' outer boundaries).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Set, Tuple

from .graphs import StarGraph, TreeGraph, WeightedGraph
from .report import BudgetError, SolveReport

__all__ = ["vexp_bruteforce", "vexp_tree_uniform", "vexp_star_weighted"]


def _common_weights(g: WeightedGraph):
    """Vertex masses as integers over one denominator."""
    denom = 1
    for p in g.pi:
        denom = denom * p.denominator // math.gcd(denom, p.denominator)
    return [int(p * denom) for p in g.pi], denom


def vexp_bruteforce(g: WeightedGraph, max_n: int = 20) -> SolveReport:
    """Exact vertex expansion by scanning every proper cut.

    Value is min over nonempty proper S of
    pi(boundary(S)) / min(pi(S), pi(V minus S)); sides with zero mass are
    skipped. Ties in the witness go to the lexicographically smallest set.
    """
    n = g.n
    if n > max_n:
        raise BudgetError(f"n={n} exceeds max_n={max_n}")
    if n < 2:
        raise ValueError("need n >= 2")
    w, total = _common_weights(g)

    # weight-sum lookup by half-words keeps the scan O(m) per subset
    half = n // 2
    lo_bits, hi_bits = half, n - half
    lo_sum = [0] * (1 << lo_bits)
    for i in range(lo_bits):
        step = 1 << i
        for m in range(step, step << 1):
            lo_sum[m] = lo_sum[m - step] + w[i]
    hi_sum = [0] * (1 << hi_bits)
    for i in range(hi_bits):
        step = 1 << i
        for m in range(step, step << 1):
            hi_sum[m] = hi_sum[m - step] + w[half + i]

    def mass_of(mask: int) -> int:
        return lo_sum[mask & ((1 << lo_bits) - 1)] + hi_sum[mask >> lo_bits]

    edges = [(1 << u, 1 << v) for u, v in g.edges]
    best_num, best_den = None, None   # value = best_num / best_den
    best_mask = 0
    for mask in range(1, (1 << n) - 1):
        side = mass_of(mask)
        small = min(side, total - side)
        if small == 0:
            continue
        bmask = 0
        for bu, bv in edges:
            if bool(mask & bu) != bool(mask & bv):
                bmask |= bu | bv
        bnd = mass_of(bmask)
        if best_num is None or bnd * best_den < best_num * small:
            best_num, best_den, best_mask = bnd, small, mask
        elif bnd * best_den == best_num * small:
            cand = tuple(v for v in range(n) if mask >> v & 1)
            cur = tuple(v for v in range(n) if best_mask >> v & 1)
            if cand < cur:
                best_mask = mask
    if best_num is None:
        raise ValueError("no proper cut with positive mass on both sides")
    value = Fraction(best_num, best_den)
    witness = tuple(v for v in range(n) if best_mask >> v & 1)
    return SolveReport.exact(value, witness=witness,
                             subsets_scanned=(1 << n) - 2)


# ---------------------------------------------------------------------------
# uniform-tree DP
# ---------------------------------------------------------------------------

def vexp_tree_uniform(t: TreeGraph) -> SolveReport:
    """Exact vertex expansion of a tree under the uniform distribution.

    Post-order DP: for each vertex v, label a of v, and assumed label p of
    its parent, the achievable set of pairs (count of side-A vertices in the
    subtree, count of boundary vertices in the subtree).  A vertex joins the
    boundary when some neighbor takes the other label, so v's own
    contribution is resolved only after its children and parent labels are
    fixed; the flag inside the accumulation remembers whether a child
    already differs.  The answer is read off the root states.
    """
    n = t.n
    if any(p != t.pi[0] for p in t.pi):
        raise ValueError("requires the uniform distribution")
    if n < 2:
        raise ValueError("need n >= 2")

    # states[v][a][p] = set of (n_A, boundary_count) over labelings of
    # subtree(v) given label(v)=a and label(parent)=p
    states: List[List[List[Set[Tuple[int, int]]]]] = [
        [[set(), set()], [set(), set()]] for _ in range(n)
    ]
    # choice[(v, a, p, n, b)] = per-child (label, n_c, b_c) list, for witness
    choice: Dict[Tuple[int, int, int, int, int], tuple] = {}

    for v in reversed(t.bfs_order):
        children = [w for w in t.neighbors[v] if t.parent[w] == v]
        for a in (0, 1):
            for p in (0, 1):
                # acc: (n, b, child_differs) -> per-child decisions
                acc = {(1 if a == 0 else 0, 0, False): ()}
                for c in children:
                    nxt = {}
                    for (cn, cb, flag), made in acc.items():
                        for ca in (0, 1):
                            for (n_c, b_c) in sorted(states[c][ca][a]):
                                key = (cn + n_c, cb + b_c, flag or ca != a)
                                if key not in nxt:
                                    nxt[key] = made + ((c, ca, n_c, b_c),)
                    acc = nxt
                for (cn, cb, flag), made in acc.items():
                    b = cb + (1 if (flag or p != a) else 0)
                    if (cn, b) not in states[v][a][p]:
                        states[v][a][p].add((cn, b))
                        choice[(v, a, p, cn, b)] = made

    root = t.root
    best = None  # (value, a, n_A, b)
    for a in (0, 1):
        for (nA, b) in states[root][a][a]:
            if not (0 < nA < n):
                continue
            value = Fraction(b, min(nA, n - nA))
            key = (value, a, nA, b)
            if best is None or key < best:
                best = key
    value, a, nA, b = best

    members: Set[int] = set()

    def unwind(v: int, label: int, parent_label: int, n_v: int, b_v: int):
        if label == 0:
            members.add(v)
        for (c, ca, n_c, b_c) in choice[(v, label, parent_label, n_v, b_v)]:
            unwind(c, ca, label, n_c, b_c)

    unwind(root, a, a, nA, b)
    side = tuple(sorted(members))
    other = tuple(v for v in range(n) if v not in members)
    witness = min(side, other)
    return SolveReport.exact(value, witness=witness,
                             states_root=len(states[root][0][0])
                             + len(states[root][1][1]))


# ---------------------------------------------------------------------------
# weighted stars
# ---------------------------------------------------------------------------

_STAR_SUM_BUDGET = 20_000_000


def vexp_star_weighted(s: StarGraph) -> SolveReport:
    """Exact vertex expansion of a weighted star.

    Any cut is determined by its leaf set L on the center-free side: the
    boundary is L plus the center, so the value is
    (pi(L) + pi_0) / min(pi(L), 1 - pi(L)).  All achievable pi(L) are
    enumerated with a subset-sum bitset over the common denominator;
    each sum is checked together with its center-containing complement.
    """
    if not isinstance(s, StarGraph):
        raise TypeError("expects a star")
    w, total = _common_weights(s)
    center_w = w[0]
    leaf_w = w[1:]
    if total > _STAR_SUM_BUDGET or len(leaf_w) * total > 10 * _STAR_SUM_BUDGET:
        raise BudgetError(f"common denominator {total} too large for "
                          f"{len(leaf_w)} leaves")

    reach = 1
    prefixes = []
    for lw in leaf_w:
        prefixes.append(reach)
        reach |= reach << lw

    def leaf_set_for(target: int) -> Tuple[int, ...]:
        # walk back preferring exclusion, so small-index leaves are kept
        # out of L unless needed
        picked = []
        rem = target
        for i in range(len(leaf_w) - 1, -1, -1):
            if prefixes[i] >> rem & 1:
                continue
            picked.append(i + 1)
            rem -= leaf_w[i]
        assert rem == 0
        return tuple(sorted(picked))

    n = s.n
    best = None  # (value, witness tuple)
    scanned = 0
    mask = reach
    while mask:
        low = mask & -mask
        mask ^= low
        target = low.bit_length() - 1
        scanned += 1
        small = min(target, total - target)
        if small == 0:
            continue
        value = Fraction(target + center_w, small)
        if best is not None and value > best[0]:
            continue
        L = leaf_set_for(target)
        comp = tuple(sorted(set(range(n)) - set(L)))
        wit = min(L, comp)
        if best is None or (value, wit) < best:
            best = (value, wit)
    if best is None:
        raise ValueError("no proper cut with positive mass on both sides")
    return SolveReport.exact(best[0], witness=best[1], sums_scanned=scanned)
