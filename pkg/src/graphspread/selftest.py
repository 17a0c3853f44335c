"""Reduced-trial invariant suites for the installed package.

Each suite re-derives the quantities it checks from first principles
(independent formulas, pinned closed-form values, cross-solver agreement)
so that a corrupted constant inside a solver cannot silently cancel out.
The mutation hooks deliberately corrupt one constant at a time and serve
as negative controls: "tau" must fail exactly the rounding suite, "grid"
exactly the approximation suite.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from . import lambda_inf, mve, reductions, spread, vexp
from .graphs import (StarGraph, TreeGraph, WeightedGraph, lipschitz_check,
                     variance, variance_exact)

MUTATIONS = ("none", "tau", "grid")


def _rand_masses(rng: random.Random, n: int):
    parts = [rng.randint(1, 9) for _ in range(n)]
    total = sum(parts)
    return [Fraction(x, total) for x in parts]


def _rand_star(rng: random.Random, n: int) -> StarGraph:
    return StarGraph.from_masses(_rand_masses(rng, n))


def _rand_tree(rng: random.Random, n: int) -> TreeGraph:
    edges = tuple((rng.randrange(v), v) for v in range(1, n))
    return TreeGraph(n=n, edges=edges, pi=tuple(_rand_masses(rng, n)))


def _claw() -> TreeGraph:
    third = Fraction(1, 3)
    return TreeGraph(4, ((0, 1), (0, 2), (0, 3)),
                     (Fraction(0), third, third, third),
                     allow_zero_mass=True)


# --------------------------------------------------------------- suites

def _suite_graph_identities(rng: random.Random):
    bad = []
    for _ in range(5):
        t = _rand_tree(rng, rng.randint(2, 8))
        vals = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(t.n)]
        ex = variance_exact(vals, t)
        fl = variance([float(v) for v in vals], t)
        if abs(fl - float(ex)) > 1e-9 * max(1.0, abs(float(ex))):
            bad.append(f"variance mismatch {fl} vs {ex}")
        ok, _, worst = lipschitz_check(np.zeros(t.n), t)
        if not ok or worst != 0.0:
            bad.append("zero embedding failed the Lipschitz check")
    return bad


def _suite_star_lambda(rng: random.Random):
    bad = []
    F = Fraction
    pinned = [
        ([F(1, 2), F(1, 6), F(1, 6), F(1, 6)], F(36, 17)),
        ([F(1, 2), F(1, 8), F(1, 8), F(1, 4)], F(2)),
    ]
    for masses, want in pinned:
        got = lambda_inf.star_closed_form(StarGraph.from_masses(masses)).value_fraction()
        if got != want:
            bad.append(f"closed form {got} != {want}")
    for _ in range(8):
        s = _rand_star(rng, rng.randint(2, 6))
        lo, hi = lambda_inf.star_value_bracket(s)
        rep = lambda_inf.star_closed_form(s)
        if "value_exact" in rep.diagnostics:
            v = rep.value_fraction()
            if not lo <= v <= hi:
                bad.append(f"bracket [{float(lo)},{float(hi)}] misses {float(v)}")
        if float(lambda_inf.star_lower_bound(s)) > float(hi) * (1 + 1e-12):
            bad.append("bracket below the universal lower bound")
    return bad


def _suite_approximation(rng: random.Random):
    bad = []
    for _ in range(6):
        s = _rand_star(rng, rng.randint(2, 5))
        eps = min(0.08, 0.4 * float(min(s.pi)))
        rep = lambda_inf.star_fptas(s, eps)
        exact = lambda_inf.star_closed_form(s)
        v = float(exact.value)
        if not v - 1e-12 <= rep.value <= v * (1 + eps) + 1e-12:
            bad.append(f"fptas {rep.value} outside [{v}, {v*(1+eps)}]")
        # the grid must follow the eps^2/(100 n) law; recomputed independently
        want = Fraction(eps) ** 2 / (100 * s.n)
        got = Fraction(rep.diagnostics["grid_step_exact"])
        if got != want:
            bad.append(f"grid step {got} != eps^2/(100 n) = {want}")
    return bad


def _suite_spread(rng: random.Random):
    bad = []
    third = Fraction(1, 3)
    claw_star = StarGraph.from_masses(
        [Fraction(0), third, third, third], allow_zero_mass=True)
    claw_val = spread.star_spread_exact(claw_star).value_fraction()
    if claw_val != Fraction(8, 9):
        bad.append(f"claw spread {claw_val} != 8/9")
    for _ in range(6):
        s = _rand_star(rng, rng.randint(2, 6))
        a = spread.star_spread_exact(s).value_fraction()
        b = spread.abs_oracle(s).value_fraction()
        if a != b:
            bad.append(f"star solver {a} != oracle {b}")
    for _ in range(3):
        t = _rand_tree(rng, rng.randint(3, 8))
        truth = spread.abs_oracle(t).value_fraction()
        rep = spread.tree_spread_fptas(t, Fraction(1, 100))
        lo = float(truth) / 1.01 - 1e-12
        if not lo <= rep.value <= float(truth) + 1e-12:
            bad.append(f"tree fptas {rep.value} outside [{lo}, {float(truth)}]")
    return bad


def _suite_tree_embedding(rng: random.Random):
    bad = []
    for _ in range(3):
        t = _rand_tree(rng, rng.randint(2, 7))
        rep = mve.tree_mve2_value(t)
        if rep.diagnostics.get("feasible_cases") != 1:
            bad.append("barycenter case count != 1")
        emb = mve.tree_mve2_embed(t)
        if abs(variance(emb, t) - rep.value) > 1e-9 * max(1.0, rep.value):
            bad.append("embedding variance drifts from the reported value")
        ok, edge, _ = lipschitz_check(emb, t, tol=1e-9)
        if not ok:
            bad.append(f"embedding stretches edge {edge}")
        one_dim = spread.abs_oracle(t).value_fraction()
        if rep.value < float(one_dim) - 1e-9:
            bad.append("two dimensions scored below one")
    return bad


def _suite_lift(rng: random.Random):
    bad = []
    k2 = TreeGraph(n=2, edges=((0, 1),), pi=(Fraction(1, 2), Fraction(1, 2)))
    lift = mve.lift_solve(k2, max_iters=8000)
    if abs(lift.objective() - 0.25) > 1e-4:
        bad.append(f"two-vertex lift {lift.objective()} != 0.25")
    t = _rand_tree(rng, 6)
    truth = mve.tree_mve2_value(t).value
    got = mve.lift_solve(t).objective()
    if abs(got - truth) > 1e-3 * max(1.0, truth):
        bad.append(f"tree lift {got} vs exact {truth}")
    return bad


def _suite_rounding(rng: random.Random):
    bad = []
    # scaling divisor re-derived with the natural logarithm
    for k in (1, 2, 4, 8):
        for n in (4, 16, 100):
            want = k + 2.0 * math.sqrt(3.0 * k * math.log(n)) + 6.0 * math.log(n)
            if abs(mve.tau_k(k, n) - want) > 1e-9:
                bad.append(f"tau({k},{n}) = {mve.tau_k(k, n)} != {want}")
                return bad
    emb = mve.tree_mve2_embed(_claw())
    lift = mve.GramLift(graph=_claw(), X=emb @ emb.T)
    y1, r1 = mve.gaussian_round(lift, k=2, seed=7)
    y2, r2 = mve.gaussian_round(lift, k=2, seed=7)
    if y1.tobytes() != y2.tobytes():
        bad.append("same seed produced different projections")
    if r1.tau != r2.tau:
        bad.append("same seed produced different scaling")
    summary = mve.gaussian_trials(lift, k=2, trials=300, base_seed=11)
    off = np.abs(summary.pair_mean - summary.pair_truth) > 5 * summary.pair_se
    if np.any(off):
        bad.append(f"pairwise identity off by > 5 SE on {int(off.sum())} pairs")
    if summary.violation_rate > 2 / lift.graph.n:
        bad.append(f"violation rate {summary.violation_rate} > 2/n")
    if summary.variance_rate < 1 / 24:
        bad.append(f"variance retention rate {summary.variance_rate} < 1/24")
    return bad


def _suite_vertex_expansion(rng: random.Random):
    bad = []
    quarter = Fraction(1, 4)
    s4 = StarGraph.from_masses([quarter] * 4)
    if vexp.vexp_bruteforce(s4).value_fraction() != Fraction(3, 2):
        bad.append("uniform 4-star brute value != 3/2")
    third = Fraction(1, 3)
    p3 = TreeGraph(n=3, edges=((0, 1), (1, 2)), pi=(third, third, third))
    if vexp.vexp_tree_uniform(p3).value_fraction() != 2:
        bad.append("uniform path value != 2")
    for _ in range(5):
        n = rng.randint(2, 9)
        edges = tuple((rng.randrange(v), v) for v in range(1, n))
        t = TreeGraph(n=n, edges=edges, pi=(Fraction(1, n),) * n)
        a = vexp.vexp_tree_uniform(t).value_fraction()
        b = vexp.vexp_bruteforce(t).value_fraction()
        if a != b:
            bad.append(f"tree dp {a} != brute {b}")
    for _ in range(5):
        s = _rand_star(rng, rng.randint(2, 8))
        a = vexp.vexp_star_weighted(s).value_fraction()
        b = vexp.vexp_bruteforce(s).value_fraction()
        if a != b:
            bad.append(f"star solver {a} != brute {b}")
    return bad


def _suite_reductions(rng: random.Random):
    bad = []
    import itertools
    insts = [parts for k in range(1, 5)
             for parts in itertools.combinations_with_replacement(range(1, 6), k)]
    for beta in (Fraction(3, 2), Fraction(2)):
        for parts in insts:
            if reductions.decide_partition(parts, beta) is not \
                    reductions.partition_bruteforce(parts):
                bad.append(f"decide disagrees on {parts}, beta={beta}")
                return bad
    for parts in insts:
        if not reductions.spread_gap_check(parts, Fraction(1, 2)):
            bad.append(f"spread gadget disagrees on {parts}")
            return bad
    for _ in range(10):
        parts = [rng.randint(1, 20) for _ in range(rng.randint(1, 8))]
        if sum(reductions.to_lambda_star(parts, Fraction(2)).pi) != 1:
            bad.append(f"lambda gadget masses of {parts} do not sum to 1")
        if sum(reductions.to_spread_star(parts, Fraction(1, 2)).pi) != 1:
            bad.append(f"spread gadget masses of {parts} do not sum to 1")
    return bad


_SUITES = (
    ("graph-identities", _suite_graph_identities),
    ("star-lambda", _suite_star_lambda),
    ("approximation", _suite_approximation),
    ("spread", _suite_spread),
    ("tree-embedding", _suite_tree_embedding),
    ("lift", _suite_lift),
    ("rounding", _suite_rounding),
    ("vertex-expansion", _suite_vertex_expansion),
    ("reductions", _suite_reductions),
)


def run_selftest(mutate: str = "none", seed: int = 0) -> dict:
    """Run every suite; returns {"ok", "mutation", "suites": {name: ...}}.

    mutate corrupts one constant for the duration of the run: "tau" switches
    the rounding divisor to base-2 logarithms, "grid" doubles the
    approximation scheme's balance grid. The corresponding suite must fail.
    """
    if mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}; options: {MUTATIONS}")
    patches = []
    if mutate == "tau":
        patches.append((mve, "_TAU_LOG", math.log2))
    elif mutate == "grid":
        patches.append((lambda_inf, "_GRID_SCALE", Fraction(2)))
    saved = [(obj, name, getattr(obj, name)) for obj, name, _ in patches]
    for obj, name, value in patches:
        setattr(obj, name, value)
    try:
        suites = {}
        for name, fn in _SUITES:
            rng = random.Random(seed ^ hash(name) & 0xFFFF)
            try:
                failures = fn(rng)
            except Exception as exc:  # a crash is a failure, not an abort
                failures = [f"{type(exc).__name__}: {exc}"]
            suites[name] = {"ok": not failures, "failures": failures}
    finally:
        for obj, name, value in saved:
            setattr(obj, name, value)
    return {
        "ok": all(s["ok"] for s in suites.values()),
        "mutation": mutate,
        "suites": suites,
    }
