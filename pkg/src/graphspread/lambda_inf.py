"""Solvers for the lambda-infinity constant: the minimum over valuations x of

    E_{v~pi} max_{u in N(v)} (x_u - x_v)^2  /  Var_pi(x).

Stars admit an exact closed-form solver (optimal valuations put the center at
0 and all leaves at +-1 except at most one), a subset-sum tightness test for
the 1/(1-pi_0) lower bound, and a (1+eps) approximation scheme whose balance
search runs on a rounded grid. Small general graphs get a certified interval
from a furthest-neighbor region decomposition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.optimize

from .graphs import (DegenerateValuationError, GraphError, StarGraph,
                     WeightedGraph, as_star, lambda_objective)
from .report import BudgetError, SolveReport

# Negative-control hook for the self-test suite: scales the balance grid cell
# width. Must be 1 in production; the approximation suite cross-checks the
# reported grid step against the eps^2/(100 n) formula and fails otherwise.
_GRID_SCALE = Fraction(1)


@dataclass
class LambdaInterval:
    """Certified bracket lo <= lambda_inf <= hi with a witness attaining hi."""

    lo: float
    hi: float
    witness: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def star_lower_bound(s: StarGraph) -> Fraction:
    """Exact universal star lower bound 1/(1 - center mass)."""
    if s.pi[0] == 1:
        raise GraphError("center carries all mass; bound undefined")
    return 1 / (1 - s.pi[0])


def star_is_tight(s: StarGraph) -> bool:
    """True iff the leaves split into two sets of equal mass (then the lower
    bound is attained). Decided exactly by an integer subset-sum."""
    leaves = list(s.leaf_masses)
    if not leaves:
        return True
    denom = math.lcm(*(f.denominator for f in leaves))
    weights = [int(f * denom) for f in leaves]
    total = sum(weights)
    if total % 2:
        return False
    reach = 1
    for w in weights:
        reach |= reach << w
    return bool((reach >> (total // 2)) & 1)


# ---------------------------------------------------------------------------
# closed-form machinery for almost-binary star valuations
#
# Fix the special leaf i with mass a; the other leaves sit at +-1 with signed
# mass sum d, S1 = their total mass. With the center at 0 and the special
# leaf at y, the objective is U(y)/D(y) with
#     U(y) = (1 - a) + a y^2          (numerator; binary part contributes 1-a)
#     D(y) = S1 + a y^2 - (d + a y)^2 (the variance)
# Critical points of U/D are the roots of the quadratic
#     g(y) = -a d y^2 + (S1 - d^2 - (1-a)^2) y + (1-a) d
# (the cubic terms cancel), so each (i, sign pattern) needs O(1) work.
# ---------------------------------------------------------------------------

def _quad_roots(A: float, B: float, C: float):
    """Real roots of A y^2 + B y + C, numerically stable."""
    if A == 0.0:
        if B == 0.0:
            return []
        return [-C / B]
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    if B == 0.0:
        r = sq / (2.0 * A)
        return [r, -r]
    q = -(B + math.copysign(sq, B)) / 2.0
    roots = [q / A]
    if q != 0.0:
        roots.append(C / q)
    return roots


class _Candidate:
    __slots__ = ("val", "exact", "y", "special", "signs")

    def __init__(self, val, exact, y, special, signs):
        self.val = val        # float objective value
        self.exact = exact    # Fraction value when rational, else None
        self.y = y            # special-leaf position
        self.special = special
        self.signs = signs    # dict leaf -> +-1 for the non-special leaves


def _better(a: _Candidate, b: _Candidate) -> _Candidate:
    """Smaller value wins; near-ties (1e-12 relative) prefer the exact
    candidate, then the smaller |y|."""
    if a is None:
        return b
    if b is None:
        return a
    scale = max(abs(a.val), abs(b.val), 1.0)
    if abs(a.val - b.val) <= 1e-12 * scale:
        if (a.exact is None) != (b.exact is None):
            return a if a.exact is not None else b
        if a.exact is not None and a.exact != b.exact:
            # float near-tie between distinct rationals; settle it exactly
            return a if a.exact < b.exact else b
        if abs(a.y) != abs(b.y):
            return a if abs(a.y) < abs(b.y) else b
        return a if a.val <= b.val else b
    return a if a.val < b.val else b


def _scan_pattern(a: Fraction, S1: Fraction, d: Fraction, special, signs):
    """All candidate minima for one (special leaf, sign pattern): both
    endpoints evaluated exactly, interior critical points in float."""
    out = []
    af, S1f, df = float(a), float(S1), float(d)
    for e in (1, -1):
        D = S1 + a - (d + e * a) ** 2
        if D > 0:
            val = 1 / D
            out.append(_Candidate(float(val), val, float(e), special, signs))
    A = -af * df
    B = S1f - df * df - (1.0 - af) ** 2
    C = (1.0 - af) * df
    for y in _quad_roots(A, B, C):
        if -1.0 < y < 1.0:
            D = S1f + af * y * y - (df + af * y) ** 2
            if D > 1e-15:
                val = ((1.0 - af) + af * y * y) / D
                out.append(_Candidate(val, None, y, special, signs))
    return out


def _star_witness(s: StarGraph, cand: _Candidate) -> np.ndarray:
    x = np.zeros(s.n)
    for leaf, sign in cand.signs.items():
        x[leaf] = sign
    if cand.special is not None:
        x[cand.special] = cand.y
    return x


def star_closed_form(s: StarGraph) -> SolveReport:
    """Exact star solver: enumerate the special leaf and the sign pattern of
    the remaining leaves, minimizing over the special position in closed
    form. Exponential in the leaf count; meant for small stars."""
    pi0 = s.pi[0]
    leaves = [j for j in range(1, s.n)]
    pos = [j for j in leaves if s.pi[j] > 0]
    if not pos:
        raise DegenerateValuationError("degenerate valuation")
    best = None
    for i in pos:
        a = s.pi[i]
        others = [j for j in leaves if j != i]
        others_pos = [j for j in others if s.pi[j] > 0]
        S1 = 1 - pi0 - a
        for bits in range(1 << len(others_pos)):
            d = Fraction(0)
            signs = {j: 1 for j in others}
            for t, j in enumerate(others_pos):
                sign = 1 if (bits >> t) & 1 else -1
                signs[j] = sign
                d += sign * s.pi[j]
            for cand in _scan_pattern(a, S1, d, i, signs):
                best = _better(best, cand)
    if best is None:
        raise DegenerateValuationError("degenerate valuation")
    witness = _star_witness(s, best)
    diagnostics = {"special_leaf": best.special, "special_position": best.y}
    if best.exact is not None:
        diagnostics["value_exact"] = str(best.exact)
    return SolveReport.exact(
        best.exact if best.exact is not None else best.val,
        witness=witness, **diagnostics)


def star_value_float(pi0: float, leaves: np.ndarray) -> float:
    """Vectorized float64 version of the exact star scan (one instance).

    Used by large instance sweeps; agrees with star_closed_form to float
    precision. Requires strictly positive leaf masses.
    """
    leaves = np.asarray(leaves, dtype=float)
    m = leaves.size
    best = math.inf
    for idx in range(m):
        a = leaves[idx]
        others = np.delete(leaves, idx)
        S1 = 1.0 - pi0 - a
        k = others.size
        if k:
            signs = ((np.arange(1 << k)[:, None] >> np.arange(k)) & 1) * 2.0 - 1.0
            d = signs @ others
        else:
            d = np.zeros(1)
        for e in (1.0, -1.0):
            D = S1 + a - (d + e * a) ** 2
            good = D > 1e-15
            if good.any():
                best = min(best, float((1.0 / D[good]).min()))
        A = -a * d
        B = S1 - d * d - (1.0 - a) ** 2
        C = (1.0 - a) * d
        disc = B * B - 4.0 * A * C
        quad = (np.abs(A) > 1e-300) & (disc >= 0.0)
        roots = []
        if quad.any():
            sq = np.sqrt(disc[quad])
            q = -(B[quad] + np.copysign(sq, B[quad])) / 2.0
            with np.errstate(divide="ignore", invalid="ignore"):
                r1 = q / A[quad]
                r2 = np.where(q != 0.0, C[quad] / np.where(q == 0.0, 1.0, q), np.nan)
            roots.append((r1, A[quad], B[quad], C[quad], d[quad]))
            roots.append((r2, A[quad], B[quad], C[quad], d[quad]))
        lin = (np.abs(A) <= 1e-300) & (np.abs(B) > 1e-300)
        if lin.any():
            roots.append((-C[lin] / B[lin], A[lin], B[lin], C[lin], d[lin]))
        for r, _, _, _, dd in roots:
            ok = np.isfinite(r) & (np.abs(r) < 1.0)
            if not ok.any():
                continue
            y = r[ok]
            dv = dd[ok]
            D = S1 + a * y * y - (dv + a * y) ** 2
            good = D > 1e-15
            if good.any():
                vals = ((1.0 - a) + a * y[good] ** 2) / D[good]
                best = min(best, float(vals.min()))
    return best


_BRACKET_SLACK = Fraction(1, 10**9)


def star_value_bracket(s: StarGraph, max_leaves: int = 24):
    """Certified enclosure (lo, hi) of the star constant as exact rationals.

    The all-endpoints part of the scan runs in exact integer arithmetic over
    the common mass denominator: with leaf integer masses summing to N,
    center n0, denominator D, a full sign assignment with signed sum sigma
    scores D^2 / (N*D - sigma^2), so the best endpoint value needs only the
    achievable sigma^2 minimum. When that value meets the universal lower
    bound D/N the bracket collapses to a point and interior critical points
    cannot matter. Otherwise they are scanned in float64 and widened by a
    1e-9 relative slack. Orders of magnitude faster than star_closed_form on
    instance sweeps; no witness.
    """
    denom = 1
    for f in s.pi:
        denom = math.lcm(denom, f.denominator)
    ints = [int(f * denom) for f in s.pi]
    n0, leaf_ints = ints[0], ints[1:]
    m = len(leaf_ints)
    if m > max_leaves:
        raise BudgetError(f"{m} leaves exceed max_leaves={max_leaves}")
    total = denom - n0
    # int64 squares stay exact below this; huge denominators take object dtype
    dtype = np.int64 if denom <= 10**9 else object
    weights = np.array(leaf_ints, dtype=dtype)
    p_base = total * denom
    p_best = None
    chunk = 1 << 14
    for start in range(0, 1 << m, chunk):
        stop = min(start + chunk, 1 << m)
        signs = ((np.arange(start, stop)[:, None] >> np.arange(m)) & 1) * 2 - 1
        sigma = signs.astype(dtype) @ weights
        p = p_base - sigma * sigma
        pos = p[p > 0]
        if pos.size:
            cand = int(pos.max())
            if p_best is None or cand > p_best:
                p_best = cand
        if p_best == p_base:
            break
    if p_best is None:
        raise DegenerateValuationError("degenerate valuation")
    end_exact = Fraction(denom * denom, p_best)
    if p_best == p_base:
        # balanced assignment exists; the universal lower bound is attained
        return end_exact, end_exact
    interior = _interior_scan_float(s, chunk)
    if not math.isfinite(interior):
        return end_exact, end_exact
    int_f = Fraction(interior)
    lo = min(end_exact, int_f * (1 - _BRACKET_SLACK))
    hi = min(end_exact, int_f * (1 + _BRACKET_SLACK))
    return lo, hi


def _interior_scan_float(s: StarGraph, chunk: int = 1 << 14) -> float:
    """Minimum objective over interior critical points of the special leaf,
    jointly vectorized over (full sign pattern, choice of special leaf).

    Each (special leaf i, signs of the others) pair appears under exactly two
    full patterns (either sign of leaf i) with the same others-sum d, so
    scanning full patterns and peeling leaf i off the total covers every case
    (twice, harmlessly).
    """
    pi0 = float(s.pi[0])
    leaves_f = np.array([float(f) for f in s.pi[1:]])
    m = leaves_f.size
    pos = np.nonzero(leaves_f > 0.0)[0]
    if pos.size == 0:
        return math.inf
    a = leaves_f[pos]
    S1 = (1.0 - pi0) - a
    one_a = 1.0 - a
    interior = math.inf
    for start in range(0, 1 << m, chunk):
        stop = min(start + chunk, 1 << m)
        sg = ((np.arange(start, stop)[:, None] >> np.arange(m)) & 1) * 2.0 - 1.0
        sigma = sg @ leaves_f
        d = sigma[:, None] - sg[:, pos] * a[None, :]
        A = -a * d
        B = S1 - d * d - one_a ** 2
        C = one_a * d
        with np.errstate(divide="ignore", invalid="ignore"):
            sq = np.sqrt(B * B - 4.0 * A * C)     # nan when disc < 0
            q = -(B + np.copysign(sq, B)) / 2.0
            r_candidates = (q / A, C / q, np.where(np.abs(A) < 1e-300,
                                                   -C / B, np.nan))
            for r in r_candidates:
                ok = np.isfinite(r) & (np.abs(r) < 1.0)
                if not ok.any():
                    continue
                Dv = S1 + a * r * r - (d + a * r) ** 2
                ok &= Dv > 1e-15
                if not ok.any():
                    continue
                vals = (one_a + a * r * r) / Dv
                interior = min(interior, float(vals[ok].min()))
    return interior


# ---------------------------------------------------------------------------
# (1 + eps) approximation scheme for stars
# ---------------------------------------------------------------------------

def star_fptas(s: StarGraph, eps: float) -> SolveReport:
    """Approximate the star constant within a (1+eps) factor.

    Requires 0 < eps < min(0.1, min_v pi_v). The sign-pattern search runs as
    a reachability sweep over balance values rounded to cells of width
    eps^2/(100 n) (one first-found representative pattern per cell, exact
    fraction arithmetic for the cell indices); each representative is then
    minimized over the special-leaf position via the closed form, with the
    position snapped onto the eps^2/100 witness grid bracketing each critical
    point, so the reported value is the true objective of the returned
    witness. Always at least the true constant; at most (1+eps) times it.
    """
    eps_f = float(eps)
    limit = min(0.1, float(min(s.pi)))
    if not (0.0 < eps_f < limit):
        raise ValueError(
            f"eps out of range: need 0 < eps < {limit} (0.1 and the smallest mass)")
    eps_frac = Fraction(eps_f)
    n = s.n
    delta = _GRID_SCALE * eps_frac * eps_frac / (100 * n)  # balance cell width
    ystep = eps_f * eps_f / 100.0                          # witness grid step
    pi0 = s.pi[0]
    leaves = list(range(1, n))
    units = {j: int(s.pi[j] / delta) for j in leaves}  # floor since all >= 0
    best = None
    cells_scanned = 0
    for i in leaves:
        a = s.pi[i]
        S1 = 1 - pi0 - a
        others = [j for j in leaves if j != i]
        cells = {0: (Fraction(0), ())}
        for j in others:
            nxt: dict = {}
            w = units[j]
            pj = s.pi[j]
            for r, (d, sig) in cells.items():
                for sign in (1, -1):
                    key = r + sign * w
                    if key not in nxt:  # first-found representative
                        nxt[key] = (d + sign * pj, sig + (sign,))
            cells = nxt
        cells_scanned += len(cells)
        af, S1f = float(a), float(S1)
        for _, (d, sig) in cells.items():
            signs = dict(zip(others, sig))
            df = float(d)
            # endpoints: exact
            for e in (1, -1):
                D = S1 + a - (d + e * a) ** 2
                if D > 0:
                    val = 1 / D
                    best = _better(best, _Candidate(float(val), val, float(e), i, signs))
            # interior: bracket each critical point by witness-grid snaps
            A = -af * df
            B = S1f - df * df - (1.0 - af) ** 2
            C = (1.0 - af) * df
            snap_set = set()
            for y in _quad_roots(A, B, C):
                if -1.0 < y < 1.0:
                    k = math.floor(y / ystep)
                    for yy in (k * ystep, (k + 1) * ystep):
                        if -1.0 <= yy <= 1.0:
                            snap_set.add(yy)
            for y in sorted(snap_set):
                D = S1f + af * y * y - (df + af * y) ** 2
                if D > 1e-15:
                    val = ((1.0 - af) + af * y * y) / D
                    best = _better(best, _Candidate(val, None, y, i, signs))
    if best is None:
        raise DegenerateValuationError("degenerate valuation")
    witness = _star_witness(s, best)
    diagnostics = {
        "grid_step": float(delta),
        "grid_step_exact": str(delta),
        "witness_grid_step": ystep,
        "special_leaf": best.special,
        "cells_scanned": cells_scanned,
    }
    if best.exact is not None:
        diagnostics["value_exact"] = str(best.exact)
    return SolveReport.approx(best.val, eps_f, witness=witness, **diagnostics)


# ---------------------------------------------------------------------------
# certified interval oracle for small graphs
# ---------------------------------------------------------------------------

def _region_quadratic(g: WeightedGraph, assignment) -> np.ndarray:
    n = g.n
    A = np.zeros((n, n))
    w = g.pi_float()
    for v, fv in enumerate(assignment):
        A[v, v] += w[v]
        A[fv, fv] += w[v]
        A[v, fv] -= w[v]
        A[fv, v] -= w[v]
    return A


def _safe_objective(g: WeightedGraph):
    def fun(x):
        try:
            return lambda_objective(x, g)
        except DegenerateValuationError:
            return 1e18
    return fun


def oracle_small(g: WeightedGraph, max_n: int = 10) -> LambdaInterval:
    """Certified interval for lambda-infinity on a small graph.

    Stars are solved exactly via the closed form (lo = hi). Other graphs are
    covered by enumerating, for every vertex, which neighbor attains its max
    term; each choice yields a quadratic lower-bounding the true numerator
    everywhere, so each constrained minimum is a certified lower bound (lo
    takes the largest). hi evaluates the true objective at the regional
    minimizers, improved by a deterministic local polish. lo == hi within
    1e-7 certifies exactness.
    """
    if g.n > max_n:
        raise BudgetError(f"n = {g.n} exceeds oracle budget {max_n}")
    star = as_star(g)
    if star is not None:
        s, order = star
        rep = star_closed_form(s)
        witness = np.zeros(g.n)
        for star_idx, orig in enumerate(order):
            witness[orig] = rep.witness[star_idx]
        hi = lambda_objective(witness, g)
        diag = dict(rep.diagnostics)
        diag["method"] = "star-exact"
        return LambdaInterval(lo=hi, hi=hi, witness=witness, diagnostics=diag)

    if any(p == 0 for p in g.pi):
        raise GraphError("oracle requires positive masses on non-star graphs")
    budget = 1
    for v in range(g.n):
        budget *= max(1, g.degree(v))
        if budget > 10 ** 6:
            raise BudgetError("furthest-neighbor assignment budget exceeded")

    w = g.pi_float()
    basis = scipy.linalg.null_space(w[None, :])  # mean-zero subspace
    Bred = basis.T @ (basis * w[:, None])
    lo = 0.0
    hi = math.inf
    witness = None
    n_regions = 0
    for assignment in itertools.product(*g.neighbors):
        n_regions += 1
        A = _region_quadratic(g, assignment)
        Ared = basis.T @ A @ basis
        vals, vecs = scipy.linalg.eigh(Ared, Bred)
        lam = max(0.0, float(vals[0]))
        lo = max(lo, lam)
        x = basis @ vecs[:, 0]
        try:
            obj = lambda_objective(x, g)
        except DegenerateValuationError:
            continue
        if obj < hi:
            hi = obj
            witness = x
    if witness is None:
        raise DegenerateValuationError("no non-degenerate regional minimizer")
    # deterministic local polish of the upper bound
    fun = _safe_objective(g)
    res = scipy.optimize.minimize(fun, witness, method="Nelder-Mead",
                                  options={"maxiter": 400 * g.n,
                                           "xatol": 1e-12, "fatol": 1e-12})
    if res.fun < hi:
        hi = float(res.fun)
        witness = np.asarray(res.x, dtype=float)
    hi = lambda_objective(witness, g)
    lo = min(lo, hi)
    return LambdaInterval(lo=lo, hi=hi, witness=witness,
                          diagnostics={"method": "region-eigensolve",
                                       "regions": n_regions})


def almost_binary_violation(x, s: StarGraph) -> int:
    """Number of leaves strictly inside the extreme distance from the center
    (after normalizing the largest center distance to 1)."""
    arr = np.asarray(x, dtype=float)
    dists = np.abs(arr - arr[0])
    m = float(dists.max())
    if m <= 0:
        raise DegenerateValuationError("degenerate valuation")
    return int(sum(1 for j in range(1, s.n) if abs(dists[j] / m - 1.0) > 1e-9))


def cheeger_sandwich(lam: float, phi: float) -> bool:
    """Both sides of lam/2 <= phi <= 4 lam + 4 sqrt(lam), with 1e-9 slack."""
    lam = float(lam)
    phi = float(phi)
    if lam < 0 or phi < 0:
        raise ValueError("both arguments must be nonnegative")
    return (lam / 2.0 <= phi + 1e-9) and (phi <= 4.0 * lam + 4.0 * math.sqrt(lam) + 1e-9)
