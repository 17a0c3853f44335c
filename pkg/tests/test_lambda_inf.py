"""Poincare-type constant solvers: star closed forms, the approximation
scheme, and the small-instance oracle."""

import random
from fractions import Fraction as F

import pytest

from graphspread.graphs import StarGraph, WeightedGraph, lambda_objective
from graphspread.lambda_inf import (
    almost_binary_violation,
    cheeger_sandwich,
    oracle_small,
    star_closed_form,
    star_fptas,
    star_is_tight,
    star_lower_bound,
    star_value_bracket,
)
from graphspread.report import BudgetError

from helpers import path_graph, rand_connected_graph, rand_star


def star(*masses, **kw):
    return StarGraph.from_masses([F(m) for m in masses], **kw)


# ---------------------------------------------------------------- closed forms

def test_star_lower_bound():
    assert star_lower_bound(star("1/2", "1/4", "1/4")) == 2
    assert star_lower_bound(star("1/3", "1/3", "1/3")) == F(3, 2)
    assert star_lower_bound(star(0, "1/2", "1/2", allow_zero_mass=True)) == 1
    with pytest.raises(ValueError):
        star_lower_bound(star(1, 0, 0, allow_zero_mass=True))


def test_star_is_tight():
    assert star_is_tight(star("1/2", "1/4", "1/4"))
    assert star_is_tight(star("1/2", "1/8", "1/8", "1/4"))
    assert not star_is_tight(star("1/2", "1/6", "1/6", "1/6"))


def test_star_closed_form_pinned_values():
    cases = [
        (("1/2", "1/2"), F(4)),
        (("1/3", "1/3", "1/3"), F(3, 2)),
        (("1/2", "1/8", "1/8", "1/4"), F(2)),
        (("1/2", "1/6", "1/6", "1/6"), F(36, 17)),
        (("2/3", "1/9", "1/9", "1/9"), F(81, 26)),
    ]
    for masses, want in cases:
        s = star(*masses)
        rep = star_closed_form(s)
        assert rep.value_fraction() == want, masses
        # the witness must actually attain the reported value
        assert lambda_objective(rep.witness, s) == pytest.approx(rep.value, rel=1e-9)


def test_closed_form_matches_lower_bound_iff_tight():
    rng = random.Random(41)
    for _ in range(60):
        s = rand_star(rng, rng.randint(2, 8))
        value = star_closed_form(s).value_fraction()
        bound = star_lower_bound(s)
        assert value is None or value >= bound
        if value is not None:
            assert (value == bound) == star_is_tight(s)


def test_almost_binary_violation_examples():
    s = star("1/4", "1/4", "1/4", "1/4")
    assert almost_binary_violation((0, 1, -1, 1), s) == 0
    assert almost_binary_violation((0, 1, 0.5, -1), s) == 1
    assert almost_binary_violation((0, 0.3, 0.7, 1), s) == 2


def test_certified_optimizers_are_almost_binary():
    # includes an instance whose optimum leaves one leaf strictly interior
    for masses in (("1/13", "4/13", "8/13"), ("1/2", "1/6", "1/6", "1/6"),
                   ("1/3", "1/3", "1/3"), ("1/12", "2/12", "6/12", "3/12")):
        s = star(*masses)
        rep = star_closed_form(s)
        assert almost_binary_violation(rep.witness, s) <= 1


# ---------------------------------------------------------------- fptas

def test_fptas_pinned_examples():
    r = star_fptas(star("1/2", "1/4", "1/4"), 0.01)
    assert 2 <= r.value <= 2.02
    r = star_fptas(star("1/2", "1/6", "1/6", "1/6"), 0.01)
    assert r.value > 2.018 / 1.01
    r = star_fptas(star("1/3", "1/3", "1/3"), 0.05)
    assert 1.5 <= r.value <= 1.575
    assert r.status == "approx" and r.eps == 0.05


def test_fptas_rejects_out_of_range_eps():
    s = star("1/2", "1/4", "1/4")
    for eps in (0, -0.01, 0.1, 0.3):
        with pytest.raises(ValueError):
            star_fptas(s, eps)
    # eps must also stay below the smallest mass
    with pytest.raises(ValueError):
        star_fptas(star("8/10", "1/10", "1/10"), 0.11)


def test_fptas_brackets_exact_value():
    rng = random.Random(97)
    for _ in range(25):
        s = rand_star(rng, rng.randint(2, 8), min_part=2)
        exact = star_closed_form(s).value
        eps = min(0.09, 0.9 * float(min(s.pi)))
        r = star_fptas(s, eps)
        assert exact - 1e-12 <= r.value <= (1 + eps) * exact + 1e-12


def test_fptas_monotone_refinement():
    instances = [
        ("1/2", "1/6", "1/6", "1/6"),
        ("1/2", "1/8", "1/8", "1/4"),
        ("1/3", "1/3", "1/3"),
        ("7/24", "11/40", "1/5", "7/30"),
    ]
    for masses in instances:
        s = star(*masses)
        vals = [star_fptas(s, eps).value for eps in (0.05, 0.02, 0.01)]
        assert vals[0] >= vals[1] >= vals[2]
        exact = star_closed_form(s).value
        for eps, v in zip((0.05, 0.02, 0.01), vals):
            assert exact - 1e-12 <= v <= (1 + eps) * exact + 1e-12


def test_fptas_reports_its_grid():
    s = star("1/2", "1/8", "1/8", "1/4")
    r = star_fptas(s, 0.05)
    # the step is eps^2/(100 n) with eps taken at its exact binary value
    assert F(r.diagnostics["grid_step_exact"]) == F(0.05) ** 2 / (100 * 4)


# ---------------------------------------------------------------- oracle

def test_oracle_pinned_values():
    k2 = WeightedGraph(n=2, edges=((0, 1),), pi=(F(1, 2), F(1, 2)))
    iv = oracle_small(k2)
    assert iv.lo == pytest.approx(4.0, abs=1e-9) and iv.hi == pytest.approx(4.0, abs=1e-9)

    s3 = WeightedGraph(n=3, edges=((0, 1), (0, 2)), pi=(F(1, 3),) * 3)
    iv = oracle_small(s3)
    assert iv.lo == pytest.approx(1.5, abs=1e-12) and iv.hi == pytest.approx(1.5, abs=1e-12)

    gadget = WeightedGraph(n=4, edges=((0, 1), (0, 2), (0, 3)),
                           pi=(F(1, 2), F(1, 6), F(1, 6), F(1, 6)))
    iv = oracle_small(gadget)
    assert iv.hi - 2 >= 1 / 54 - 1e-12
    assert iv.lo == pytest.approx(iv.hi, abs=1e-12)  # star route is exact


def test_oracle_certifies_cycle():
    c4 = WeightedGraph(n=4, edges=((0, 1), (1, 2), (2, 3), (0, 3)),
                       pi=(F(1, 4),) * 4)
    iv = oracle_small(c4)
    assert iv.hi - iv.lo <= 1e-7
    assert iv.hi == pytest.approx(2.0, abs=1e-7)


def test_oracle_budgets():
    with pytest.raises(BudgetError):
        oracle_small(path_graph(11))
    k8 = WeightedGraph(n=8, edges=tuple((u, v) for u in range(8)
                                        for v in range(u + 1, 8)),
                       pi=(F(1, 8),) * 8)
    with pytest.raises(BudgetError):  # degree product 7^8 over the cap
        oracle_small(k8)


def test_oracle_interval_on_random_graphs():
    rng = random.Random(59)
    done = 0
    while done < 25:
        g = rand_connected_graph(rng, rng.randint(2, 7), extra=rng.randint(0, 2))
        try:
            iv = oracle_small(g)
        except BudgetError:
            continue  # sampler may exceed the degree-product cap
        done += 1
        assert iv.lo <= iv.hi + 1e-12
        assert lambda_objective(iv.witness, g) == pytest.approx(iv.hi, rel=1e-9)


def test_oracle_relabeled_star_routes_exactly():
    # center at position 3; values must match the index-0 star
    g = WeightedGraph(n=4, edges=((0, 3), (1, 3), (2, 3)),
                      pi=(F(1, 6), F(1, 6), F(1, 6), F(1, 2)))
    iv = oracle_small(g)
    assert iv.lo == iv.hi == pytest.approx(36 / 17, abs=1e-12)
    assert lambda_objective(iv.witness, g) == pytest.approx(36 / 17, rel=1e-12)


# ---------------------------------------------------------------- bracket

def test_bracket_collapses_on_tight_stars():
    s = StarGraph.from_masses([F(1, 2), F(1, 8), F(1, 8), F(1, 4)])
    lo, hi = star_value_bracket(s)
    assert lo == hi == F(2)


def test_bracket_contains_closed_form():
    rng = random.Random(83)
    for _ in range(120):
        s = rand_star(rng, rng.randint(2, 7))
        lo, hi = star_value_bracket(s)
        assert lo <= hi
        assert float(hi - lo) <= 3e-9 * float(hi)
        rep = star_closed_form(s)
        if "value_exact" in rep.diagnostics:
            assert lo <= rep.value_fraction() <= hi
        else:
            # interior optimum is irrational; compare in float
            assert lo <= F(rep.value) * (1 + F(1, 10**8))
            assert F(rep.value) <= hi * (1 + F(1, 10**8))


def test_bracket_leaf_budget():
    with pytest.raises(BudgetError):
        star_value_bracket(StarGraph.from_masses([F(1, 2)] + [F(1, 50)] * 25))


def test_bracket_huge_denominator_falls_back_to_exact_ints():
    # common denominator far beyond int64; object-dtype path must stay exact
    masses = [F(1, 3), F(10**12 - 1, 3 * 10**12), F(1, 3), F(1, 3 * 10**12)]
    s = StarGraph.from_masses(masses)
    lo, hi = star_value_bracket(s)
    rep = star_closed_form(s)
    if "value_exact" in rep.diagnostics:
        assert lo <= rep.value_fraction() <= hi
    else:
        assert float(lo) <= rep.value * (1 + 1e-8)


# ---------------------------------------------------------------- cheeger

def test_cheeger_sandwich_examples():
    assert cheeger_sandwich(1.5, 1.5)
    assert cheeger_sandwich(4.0, 2.0)
    assert not cheeger_sandwich(10.0, 1.0)
