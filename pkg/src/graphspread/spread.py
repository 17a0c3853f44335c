"""Maximum-variance 1-Lipschitz valuations (the spread value of a graph).

Exact oracle by enumerating zero-sets and component signs, closed forms on
stars, and a per-root approximation scheme on trees driven by a signed
knapsack over branch moments.
"""

from __future__ import annotations

import bisect
import math
from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Tuple

from .graphs import StarGraph, TreeGraph, WeightedGraph
from .report import BudgetError, SolveReport

__all__ = [
    "abs_oracle",
    "star_spread_value",
    "star_spread_exact",
    "knapsack_min_abs",
    "tree_spread_fptas",
]


def _common_denominator(values: Sequence[Fraction]) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def _multi_source_dist(sources, nbrs, n: int) -> List[int]:
    dist = [-1] * n
    q = deque()
    for s in sources:
        dist[s] = 0
        q.append(s)
    while q:
        u = q.popleft()
        for w in nbrs[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def _components_off(U, nbrs, n: int) -> List[List[int]]:
    """Connected components of the subgraph induced on V minus U."""
    blocked = [False] * n
    for u in U:
        blocked[u] = True
    comp_of = [-1] * n
    comps: List[List[int]] = []
    for v in range(n):
        if blocked[v] or comp_of[v] >= 0:
            continue
        members = [v]
        comp_of[v] = len(comps)
        stack = [v]
        while stack:
            x = stack.pop()
            for w in nbrs[x]:
                if not blocked[w] and comp_of[w] < 0:
                    comp_of[w] = len(comps)
                    members.append(w)
                    stack.append(w)
        comps.append(members)
    return comps


def abs_oracle(g: WeightedGraph, max_n: int = 14) -> SolveReport:
    """Exact spread value by exhausting zero-sets and component signs.

    Every optimal valuation is a distance profile: pick a nonempty zero-set U,
    set |y_v| to the graph distance from U, and give each component of V - U
    one sign.  Enumerating all such profiles and maximizing the variance is
    exact.  Runs in O(3^n poly n); refuses instances larger than max_n.

    The scan visits zero-sets in order of increasing size, so when a
    singleton zero-set attains the optimum (always, on trees) the witness
    is a single-root profile with every edge stretched to length one.
    """
    n = g.n
    if n > max_n:
        raise BudgetError(f"n={n} exceeds abs_oracle budget max_n={max_n}")
    D = _common_denominator(g.pi)
    P = [int(p * D) for p in g.pi]
    nbrs = g.neighbors

    best_score = -1  # scores are D^2 * variance, always >= 0
    best = None      # (U, comp_of, comps, signs, dist)
    profiles = 0
    for size in range(1, n + 1):
        for U in combinations(range(n), size):
            dist = _multi_source_dist(U, nbrs, n)
            comps = _components_off(U, nbrs, n)
            A = sum(P[v] * dist[v] * dist[v] for v in range(n))
            W = [sum(P[v] * dist[v] for v in members) for members in comps]
            # signs of weightless components never move the mean
            live = [i for i, w in enumerate(W) if w != 0]
            k = max(len(live) - 1, 0)
            profiles += 1 << k
            for mask in range(1 << k):
                B = W[live[0]] if live else 0
                for j in range(k):
                    w = W[live[j + 1]]
                    B += w if not (mask >> j) & 1 else -w
                score = A * D - B * B
                if score > best_score:
                    signs = [1] * len(comps)
                    for j in range(k):
                        if (mask >> j) & 1:
                            signs[live[j + 1]] = -1
                    best_score = score
                    best = (U, comps, signs, dist)

    U, comps, signs, dist = best
    y = [0] * n
    for s, members in zip(signs, comps):
        for v in members:
            y[v] = s * dist[v]
    value = Fraction(best_score, D * D)
    return SolveReport.exact(
        value,
        witness=tuple(y),
        zero_set=tuple(U),
        component_signs=tuple(signs),
        profiles_scanned=profiles,
    )


def star_spread_value(pm, pp, p0):
    """Variance of the binary star valuation with leaf masses pm and pp
    on the two sides and p0 at the center: 4*pm*pp + (1-p0)*p0."""
    total = pm + pp + p0
    if min(pm, pp, p0) < 0 or abs(float(total) - 1.0) > 1e-9:
        raise ValueError("masses must be nonnegative and sum to 1")
    return 4 * pm * pp + (1 - p0) * p0


def _closest_split(weights: Sequence[int]):
    """Subset of integer weights whose sum is nearest to half the total,
    from below.  Returns (subset_sum, chosen index tuple)."""
    total = sum(weights)
    reach = 1
    prefixes = []
    for w in weights:
        prefixes.append(reach)
        reach |= reach << w
    half = total // 2
    low = reach & ((1 << (half + 1)) - 1)
    t = low.bit_length() - 1
    chosen = []
    r = t
    for i in range(len(weights) - 1, -1, -1):
        if (prefixes[i] >> r) & 1:
            continue  # r reachable without item i
        chosen.append(i)
        r -= weights[i]
    chosen.reverse()
    return t, tuple(chosen)


def _closest_split_mim(masses: Sequence[Fraction]):
    """Meet-in-the-middle split search for stars whose masses have an
    impractically large common denominator."""
    half = len(masses) // 2
    left, right = list(enumerate(masses[:half])), list(enumerate(masses[half:], half))

    def subset_sums(items):
        sums = [(Fraction(0), ())]
        for idx, w in items:
            sums += [(s + w, ids + (idx,)) for s, ids in sums]
        return sums

    target = sum(masses, Fraction(0)) / 2
    ls = subset_sums(left)
    rs = sorted(subset_sums(right))
    best = None
    for s, ids in ls:
        j = bisect.bisect_left(rs, (target - s, ()))
        for jj in (j - 1, j):
            if 0 <= jj < len(rs):
                tot = s + rs[jj][0]
                key = (abs(tot - target), tot, ids + rs[jj][1])
                if best is None or key < best:
                    best = key
    _, tot, ids = best
    if tot > target:  # mirror to the low side; complement has the same product
        comp = tuple(i for i in range(len(masses)) if i not in set(ids))
        tot = sum(masses, Fraction(0)) - tot
        ids = comp
    return tot, tuple(sorted(ids))


def star_spread_exact(s: StarGraph, max_leaves: int = 24) -> SolveReport:
    """Exact spread value of a star.

    The optimum puts the center at 0 and every leaf at +1 or -1, so it is a
    best split of the leaf mass: maximize 4*pm*pp + (1-p0)*p0 over subset
    sums pm.  Solved by a subset-sum bitset over a common denominator, with
    a meet-in-the-middle fallback when the denominator is huge.
    """
    p0 = s.center_mass
    leaves = s.leaf_masses
    D = _common_denominator(leaves) if leaves else 1
    total = sum(leaves, Fraction(0))
    W = [int(m * D) for m in leaves]
    if sum(W) <= 2 * 10**7 and len(W) * sum(W) <= 2 * 10**8:
        t, chosen = _closest_split(W)
        pm = Fraction(t, D)
    elif len(leaves) <= max_leaves:
        pm, chosen = _closest_split_mim(list(leaves))
    else:
        raise BudgetError(
            f"star with {len(leaves)} leaves and denominator {D} exceeds "
            "the exact split budget")
    pp = total - pm
    value = star_spread_value(pm, pp, p0)
    minus = set(chosen)
    y = (0,) + tuple(-1 if i in minus else 1 for i in range(len(leaves)))
    return SolveReport.exact(
        value,
        witness=y,
        minus_mass=str(pm),
        plus_mass=str(pp),
        minus_leaves=tuple(v + 1 for v in sorted(minus)),
        balanced=(pm == pp),
    )


def knapsack_min_abs(moments: Sequence, eps_abs) -> Tuple[tuple, object]:
    """Signs minimizing |sum of signed moments| up to additive eps_abs.

    Moments are scaled by Q = 2*m/eps_abs and floored to integers; a bitset
    DP over reachable signed integer sums finds the rounded minimum and the
    signs are recovered from per-item prefix bitsets.  Each floor loses less
    than 1/Q, so the total drift is below eps_abs/2 on each side of the
    comparison with the true optimum.

    With 13 moments or fewer the 2^(m-1) sign patterns are cheaper than any
    rounding, so the minimum is found exactly by exhaustion (the additive
    guarantee holds with slack zero).

    Returns (signs, value) where value is |sum s_b * m_b| recomputed exactly
    from the returned signs in the input arithmetic.
    """
    ms = list(moments)
    if any(mb < 0 for mb in ms):
        raise ValueError("moments must be nonnegative")
    eps_abs = Fraction(eps_abs)
    if eps_abs <= 0:
        raise ValueError("eps_abs must be positive")
    m = len(ms)
    if m == 0:
        return (), 0.0
    if m <= 13:
        # global sign flip is free, so pin the first sign to +
        best_signs, best_val = None, None
        for mask in range(1 << (m - 1)):
            signs = (1,) + tuple(-1 if (mask >> i) & 1 else 1
                                 for i in range(m - 1))
            val = abs(sum(sb * mb for sb, mb in zip(signs, ms)))
            if best_val is None or val < best_val:
                best_signs, best_val = signs, val
        return best_signs, best_val
    Q = Fraction(2 * m) / eps_abs
    ks = [int(Fraction(mb) * Q) for mb in ms]
    K = sum(ks)
    if K > 10**8 or m * K > 10**9:
        raise BudgetError("scaled knapsack range too large")

    reach = 1 << K  # bit position = signed sum + K
    prefixes = []
    for k in ks:
        prefixes.append(reach)
        reach = (reach << k) | (reach >> k)

    below = reach & ((1 << (K + 1)) - 1)
    above = reach >> K
    pos = None
    if above:
        pos = K + (above & -above).bit_length() - 1
    if below:
        cand = below.bit_length() - 1
        if pos is None or K - cand < pos - K:
            pos = cand

    signs = []
    b = pos
    for i in range(m - 1, -1, -1):
        k = ks[i]
        if b - k >= 0 and (prefixes[i] >> (b - k)) & 1:
            signs.append(1)
            b -= k
        else:
            signs.append(-1)
            b += k
    signs.reverse()
    total = sum(sb * mb for sb, mb in zip(signs, ms))
    return tuple(signs), abs(total)


def _root_profile(t: TreeGraph, root: int):
    """Distances from root, branch index of every vertex (-1 for the root),
    and per-branch first moments."""
    n = t.n
    dist = [-1] * n
    branch = [-1] * n
    dist[root] = 0
    order = [root]
    q = deque([root])
    while q:
        u = q.popleft()
        for w in t.neighbors[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                branch[w] = w if u == root else branch[u]
                q.append(w)
    branch_ids = [w for w in t.neighbors[root]]
    moments = {b: Fraction(0) for b in branch_ids}
    for v in range(n):
        if v != root:
            moments[branch[v]] += t.pi[v] * dist[v]
    return dist, branch, branch_ids, [moments[b] for b in branch_ids]


def _greedy_signs(moments: Sequence[Fraction]) -> tuple:
    """Largest-first sign balancing; |running sum| never exceeds max moment."""
    order = sorted(range(len(moments)), key=lambda i: (-moments[i], i))
    signs = [1] * len(moments)
    running = Fraction(0)
    for i in order:
        signs[i] = -1 if running > 0 else 1
        running += signs[i] * moments[i]
    return tuple(signs)


def tree_spread_fptas(t: TreeGraph, eps) -> SolveReport:
    """Spread value of a tree within a 1+eps factor.

    On a tree the optimum is a single-root profile: some root at 0, every
    other vertex at plus or minus its distance, one sign per branch at the
    root.  For each root the second moment is sign-invariant, so only
    |mean| = |sum of signed branch moments| needs minimizing; that is the
    signed knapsack.  The additive knapsack budget at each root is
    eps_eff*LB/(4*S) with S the branch moment sum, eps_eff = min(eps, 1/3)
    and LB a cheap exact lower bound (greedy signs at every root plus all
    edge cuts), which keeps the returned value inside [opt/(1+eps), opt].
    The reported value is the exact variance of the returned witness.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    n = t.n
    if n == 1:
        return SolveReport.exact(Fraction(0), witness=(0,), root=0)
    eps_eff = min(Fraction(eps), Fraction(1, 3))

    profiles = [_root_profile(t, v) for v in range(n)]
    second = []
    for v in range(n):
        dist = profiles[v][0]
        second.append(sum(t.pi[u] * dist[u] * dist[u] for u in range(n)))

    def profile_var(v: int, signs: Sequence[int]) -> Fraction:
        mean = sum(sb * mb for sb, mb in zip(signs, profiles[v][3]))
        return second[v] - mean * mean

    best_var = Fraction(-1)
    best = None  # (root, signs)
    for v in range(n):
        signs = _greedy_signs(profiles[v][3])
        var = profile_var(v, signs)
        if var > best_var:
            best_var, best = var, (v, signs)

    # edge cuts only sharpen the lower bound; they are not witnesses here
    lb = best_var
    subtree = [Fraction(0)] * n
    for u in reversed(t.bfs_order):
        subtree[u] += t.pi[u]
        if t.parent[u] >= 0:
            subtree[t.parent[u]] += subtree[u]
    for u in range(n):
        if t.parent[u] >= 0:
            lb = max(lb, subtree[u] * (1 - subtree[u]))

    if lb == 0:
        # all mass on one vertex; every valuation has zero variance
        return SolveReport.exact(Fraction(0), witness=(0,) * n, root=t.root)

    for v in range(n):
        if second[v] <= best_var:
            continue  # even a zero mean cannot beat the incumbent
        moments = profiles[v][3]
        total = sum(moments, Fraction(0))
        if total == 0:
            continue
        eps_abs = eps_eff * lb / (4 * total)
        signs, _ = knapsack_min_abs(moments, eps_abs)
        var = profile_var(v, signs)
        if var > best_var:
            best_var, best = var, (v, signs)

    root, signs = best
    dist, branch, branch_ids, _ = profiles[root]
    sign_of = dict(zip(branch_ids, signs))
    y = tuple(0 if u == root else sign_of[branch[u]] * dist[u] for u in range(n))
    rep = SolveReport.approx(float(best_var), eps=float(eps), witness=y,
                             root=root, branch_signs=tuple(signs),
                             lower_bound=str(lb))
    rep.diagnostics["value_exact"] = str(best_var)
    return rep
