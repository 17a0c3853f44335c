"""End-to-end acceptance checks.

One test per criterion; the -v node id doubles as the per-criterion
pass/fail line, and each test prints a timing summary on success.
Criteria with stated runtime budgets assert them.
"""

import itertools
import math
import random
import time
from fractions import Fraction as F

import networkx as nx
import numpy as np

from graphspread.graphs import (StarGraph, TreeGraph, WeightedGraph,
                                variance, variance_exact)
from graphspread.lambda_inf import (cheeger_sandwich, oracle_small,
                                    star_closed_form, star_fptas,
                                    star_value_bracket)
from graphspread.mve import (GramLift, gaussian_round, gaussian_trials,
                             lift_solve, pca_round, tau_k, tree_mve2_embed,
                             tree_mve2_value)
from graphspread.reductions import (decide_partition, lambda_gap_bound,
                                    partition_bruteforce, to_lambda_star,
                                    to_spread_star)
from graphspread.spread import abs_oracle, star_spread_exact, tree_spread_fptas
from graphspread.vexp import vexp_bruteforce, vexp_tree_uniform

from helpers import rand_tree, rand_star, rational_masses


def _all_multisets(max_parts=8, max_part=12):
    out = []
    for k in range(1, max_parts + 1):
        out.extend(itertools.combinations_with_replacement(
            range(1, max_part + 1), k))
    return out


def _claw():
    third = F(1, 3)
    return TreeGraph(4, ((0, 1), (0, 2), (0, 3)),
                     (F(0), third, third, third), allow_zero_mass=True)


def _shape_trees(n_lo, n_hi):
    for n in range(n_lo, n_hi + 1):
        for shape in nx.nonisomorphic_trees(n):
            yield n, tuple(sorted(tuple(sorted(e)) for e in shape.edges()))


def _done(num, name, t0, budget=None):
    elapsed = time.monotonic() - t0
    if budget is not None:
        assert elapsed < budget, f"criterion {num} took {elapsed:.1f}s >= {budget}s"
    limit = f", budget {budget}s" if budget else ""
    print(f"criterion {num} ({name}): PASS in {elapsed:.1f}s{limit}")


def test_criterion_1_balanced_star_exactness():
    t0 = time.monotonic()
    rng = random.Random(11)
    for _ in range(50):
        half = [rng.randint(1, 9) for _ in range(rng.randint(1, 4))]
        leaves = half + half[:]
        rng.shuffle(leaves)
        center = rng.randint(1, 12)
        total = center + sum(leaves)
        s = StarGraph.from_masses(
            [F(center, total)] + [F(x, total) for x in leaves])
        expect = 1 / (1 - s.pi[0])
        iv = oracle_small(s)
        assert iv.hi - iv.lo <= 1e-7
        assert F(iv.diagnostics["value_exact"]) == expect
        rep = star_fptas(s, 1e-3)
        v = rep.value_fraction()
        assert v is not None
        assert expect <= v <= expect * F(1001, 1000)
    _done(1, "balanced-star exactness", t0, budget=30)


def test_criterion_2_hardness_gap_reproduction():
    t0 = time.monotonic()
    instances = _all_multisets()
    assert len(instances) == 125969
    betas = (F(3, 2), F(2), F(3))
    disagreements = 0
    gap_failures = 0
    for parts in instances:
        truth = partition_bruteforce(parts)
        for beta in betas:
            if decide_partition(parts, beta) is not truth:
                disagreements += 1
        if not truth:
            for beta in betas:
                lo, _ = star_value_bracket(to_lambda_star(parts, beta))
                if lo - beta < lambda_gap_bound(parts, beta).gap:
                    gap_failures += 1
    assert disagreements == 0
    assert gap_failures == 0
    _done(2, "hardness-gap reproduction", t0, budget=300)


def test_criterion_3_spread_gadget_and_claw():
    t0 = time.monotonic()
    betas = (F(1, 4), F(1, 2), F(3, 4))
    for parts in _all_multisets():
        truth = partition_bruteforce(parts)
        for beta in betas:
            value = star_spread_exact(to_spread_star(parts, beta)).value_fraction()
            assert (value == beta) is truth
    claw_star = StarGraph.from_masses(
        [F(0), F(1, 3), F(1, 3), F(1, 3)], allow_zero_mass=True)
    spread_1d = star_spread_exact(claw_star).value_fraction()
    assert spread_1d == F(8, 9)
    spread_2d = tree_mve2_value(_claw())
    assert F(spread_2d.diagnostics["value_exact"]) == 1
    assert F(spread_2d.diagnostics["value_exact"]) / spread_1d == F(9, 8)
    _done(3, "spread gadget + claw", t0)


def test_criterion_4_tree_fptas_vs_oracle():
    t0 = time.monotonic()
    rng = random.Random(23)
    eps = F(1, 1000)
    cases = [TreeGraph(n=n, edges=edges, pi=(F(1, n),) * n)
             for n, edges in _shape_trees(2, 9)]
    assert len(cases) == 94
    cases += [rand_tree(rng, rng.randint(2, 9)) for _ in range(100)]
    for t in cases:
        truth = abs_oracle(t).value_fraction()
        rep = tree_spread_fptas(t, eps)
        value = rep.value_fraction()
        assert truth / (1 + eps) <= value <= truth
        # witness invariants, all exact: attains the reported value, fully
        # stretched on every edge, exactly one root pinned at zero
        w = rep.witness
        assert variance_exact(w, t) == value
        assert all(abs(w[u] - w[v]) == 1 for u, v in t.edges)
        assert sum(1 for x in w if x == 0) == 1
    _done(4, "tree FPTAS vs oracle", t0, budget=600)


def test_criterion_5_mve2_tree_pipeline():
    t0 = time.monotonic()
    rng = random.Random(37)
    for _ in range(50):
        t = rand_tree(rng, rng.randint(2, 10))
        rep = tree_mve2_value(t)
        assert rep.diagnostics["feasible_cases"] == 1
        lift = lift_solve(t)
        assert abs(lift.objective() - rep.value) <= 1e-3 * max(1.0, rep.value)
        emb = tree_mve2_embed(t)
        deltas = emb[[u for u, _ in t.edges]] - emb[[v for _, v in t.edges]]
        lengths = np.linalg.norm(deltas, axis=1)
        assert np.all(lengths <= 1 + 1e-9)          # Lipschitz
        assert np.all(np.abs(lengths - 1) <= 1e-9)  # fully stretched
        assert abs(variance(emb, t) - rep.value) <= 1e-9 * max(1.0, rep.value)
    _done(5, "two-dimensional tree pipeline", t0)


def test_criterion_6_vertex_expansion():
    t0 = time.monotonic()
    rng = random.Random(41)
    shape_count = 0
    for n, edges in _shape_trees(2, 10):
        t = TreeGraph(n=n, edges=edges, pi=(F(1, n),) * n)
        assert vexp_tree_uniform(t).value_fraction() == \
            vexp_bruteforce(t).value_fraction()
        shape_count += 1
    assert shape_count == 200
    for _ in range(100):
        n = rng.randint(2, 15)
        edges = tuple((rng.randrange(v), v) for v in range(1, n))
        t = TreeGraph(n=n, edges=edges, pi=(F(1, n),) * n)
        assert vexp_tree_uniform(t).value_fraction() == \
            vexp_bruteforce(t).value_fraction()
    stars = [StarGraph.from_masses([F(1, n)] * n) for n in range(2, 9)]
    stars += [rand_star(rng, rng.randint(2, 8)) for _ in range(30)]
    for s in stars:
        lam = float(star_closed_form(s).value)
        phi = float(vexp_bruteforce(s).value)
        assert cheeger_sandwich(lam, phi)
    _done(6, "vertex expansion", t0, budget=300)


def test_criterion_7_gaussian_rounding_concentration():
    t0 = time.monotonic()
    rng = random.Random(43)
    graphs = [_claw()]
    graphs += [rand_tree(rng, rng.randint(8, 16)) for _ in range(5)]
    for t in graphs:
        emb = tree_mve2_embed(t)
        lift = GramLift(graph=t, X=emb @ emb.T)
        n = t.n
        ks = sorted({1, 2, 4, math.ceil(math.log(n)), math.ceil(4 * math.log(n))})
        for k in ks:
            s = gaussian_trials(lift, k, trials=10_000, base_seed=1000 * k)
            assert np.all(np.abs(s.pair_mean - s.pair_truth)
                          <= 5 * s.pair_se + 1e-12)
            assert s.violation_rate <= 2 / n
            assert s.variance_rate >= 1 / 24
    _done(7, "gaussian rounding concentration", t0, budget=600)


def test_criterion_8_rounding_comparison():
    t0 = time.monotonic()
    corners = np.array([[(i >> b) & 1 for b in range(3)] for i in range(8)],
                       dtype=float)
    edges = tuple((i, j) for i in range(8) for j in range(i + 1, 8)
                  if bin(i ^ j).count("1") == 1)
    g = WeightedGraph(8, edges, (F(1, 8),) * 8)
    lift = GramLift(graph=g, X=corners @ corners.T)
    var_x = lift.objective()

    y = pca_round(lift, 1)
    pca_retained = variance(y, g) / var_x
    assert pca_retained <= 0.34

    k = 1
    ratios = []
    for seed in range(3000):
        _, rep = gaussian_round(lift, k, seed)
        ratios.append(rep.var_ratio)
    ratios = np.asarray(ratios)
    predicted = k / tau_k(k, g.n)
    se = ratios.std(ddof=1) / math.sqrt(ratios.size)
    assert abs(ratios.mean() - predicted) <= 5 * se
    print(f"  pca retains {pca_retained:.4f}; gaussian mean "
          f"{ratios.mean():.4f} vs prediction {predicted:.4f} (se {se:.1e})")
    _done(8, "rounding comparison", t0)
