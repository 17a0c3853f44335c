"""Tests for the vertex expansion solvers."""

import random
from fractions import Fraction as F

import networkx as nx
import pytest

from graphspread.graphs import (StarGraph, TreeGraph, WeightedGraph,
                                expansion_of_set)
from graphspread.lambda_inf import cheeger_sandwich, star_closed_form
from graphspread.report import BudgetError
from graphspread.vexp import (vexp_bruteforce, vexp_star_weighted,
                              vexp_tree_uniform)

from helpers import rand_connected_graph, rand_tree, rational_masses


def uniform_path(n):
    return WeightedGraph(n, tuple((i, i + 1) for i in range(n - 1)),
                         (F(1, n),) * n)


def uniform_star(n):
    return WeightedGraph(n, tuple((0, i) for i in range(1, n)),
                         (F(1, n),) * n)


def test_bruteforce_pinned():
    r = vexp_bruteforce(uniform_path(3))
    assert r.value_fraction() == 2
    assert r.witness == (0,)   # ties resolved to the lex-smallest set

    r = vexp_bruteforce(uniform_star(4))
    assert r.value_fraction() == F(3, 2)
    assert r.witness == (0, 1)

    r = vexp_bruteforce(uniform_path(2))
    assert r.value_fraction() == 2
    assert r.witness == (0,)


def test_bruteforce_budget_and_size():
    with pytest.raises(BudgetError):
        vexp_bruteforce(uniform_path(5), max_n=4)
    with pytest.raises(ValueError):
        vexp_bruteforce(WeightedGraph(1, (), (F(1),)))


def test_bruteforce_witness_and_complement_symmetry():
    rng = random.Random(17)
    for _ in range(20):
        g = rand_connected_graph(rng, rng.randint(2, 9))
        r = vexp_bruteforce(g)
        val = r.value_fraction()
        assert expansion_of_set(r.witness, g) == val
        comp = tuple(v for v in range(g.n) if v not in r.witness)
        assert expansion_of_set(comp, g) == val


def test_bruteforce_skips_zero_mass_sides():
    g = WeightedGraph(4, ((0, 1), (0, 2), (0, 3)),
                      (F(0), F(1, 3), F(1, 3), F(1, 3)),
                      allow_zero_mass=True)
    r = vexp_bruteforce(g)
    assert r.value_fraction() == 1
    # {3} attains it; the lex rule picks the complement (0,1,2)
    assert r.witness == (0, 1, 2)
    assert expansion_of_set((1,), g) == 1


def test_tree_dp_pinned():
    r = vexp_tree_uniform(TreeGraph(3, ((0, 1), (1, 2)), (F(1, 3),) * 3))
    assert r.value_fraction() == 2
    r = vexp_tree_uniform(TreeGraph(4, ((0, 1), (0, 2), (0, 3)), (F(1, 4),) * 4))
    assert r.value_fraction() == F(3, 2)
    r = vexp_tree_uniform(
        TreeGraph(5, tuple((i, i + 1) for i in range(4)), (F(1, 5),) * 5))
    assert r.value_fraction() == 1
    assert expansion_of_set(r.witness, uniform_path(5)) == 1


def test_tree_dp_rejects_nonuniform():
    t = TreeGraph(3, ((0, 1), (1, 2)), (F(1, 2), F(1, 4), F(1, 4)))
    with pytest.raises(ValueError):
        vexp_tree_uniform(t)


def test_tree_dp_equals_bruteforce_all_small_trees():
    # every unlabeled tree shape with up to 8 vertices
    for n in range(2, 9):
        for g in nx.nonisomorphic_trees(n):
            edges = tuple(tuple(sorted(e)) for e in g.edges())
            t = TreeGraph(n, edges, (F(1, n),) * n)
            a = vexp_tree_uniform(t)
            b = vexp_bruteforce(t)
            assert a.value_fraction() == b.value_fraction(), edges
            assert expansion_of_set(a.witness, t) == a.value_fraction()


def test_tree_dp_equals_bruteforce_random():
    rng = random.Random(13)
    for _ in range(30):
        n = rng.randint(2, 13)
        shape = rand_tree(rng, n)
        t = TreeGraph(n, shape.edges, (F(1, n),) * n)
        assert (vexp_tree_uniform(t).value_fraction()
                == vexp_bruteforce(t).value_fraction())


def test_star_pinned():
    r = vexp_star_weighted(StarGraph.from_masses([F(1, 4)] * 4))
    assert r.value_fraction() == F(3, 2)

    s = StarGraph.from_masses([F(1, 2), F(1, 8), F(1, 8), F(1, 4)])
    r = vexp_star_weighted(s)
    brute = vexp_bruteforce(
        WeightedGraph(4, ((0, 1), (0, 2), (0, 3)),
                      (F(1, 2), F(1, 8), F(1, 8), F(1, 4))))
    assert r.value_fraction() == brute.value_fraction() == 2

    r = vexp_star_weighted(StarGraph.from_masses([F(1, 3)] * 3))
    assert r.value_fraction() == 2


def test_star_requires_star():
    with pytest.raises(TypeError):
        vexp_star_weighted(uniform_path(3))


def test_star_equals_bruteforce_random():
    rng = random.Random(99)
    for _ in range(40):
        k = rng.randint(2, 10)
        masses = rational_masses(rng, k + 1)
        s = StarGraph.from_masses(masses)
        g = WeightedGraph(k + 1, tuple((0, i) for i in range(1, k + 1)),
                          tuple(masses))
        r = vexp_star_weighted(s)
        assert r.value_fraction() == vexp_bruteforce(g).value_fraction()
        assert expansion_of_set(r.witness, s) == r.value_fraction()


def test_star_budget_error():
    big = 50000017
    parts = [3, 5, 7, 11, 13, big - 39]
    masses = [F(1, 100)] + [F(k * 99, big * 100) for k in parts]
    s = StarGraph.from_masses(masses)
    with pytest.raises(BudgetError):
        vexp_star_weighted(s)


def test_cheeger_sandwich_on_stars():
    # uniform stars, every size the brute force covers quickly
    for n in range(2, 9):
        lam = star_closed_form(StarGraph.from_masses([F(1, n)] * n))
        phi = vexp_bruteforce(uniform_star(n))
        assert cheeger_sandwich(lam.value, float(phi.value))
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(2, 8)
        masses = rational_masses(rng, n)
        lam = star_closed_form(StarGraph.from_masses(masses))
        g = WeightedGraph(n, tuple((0, i) for i in range(1, n)), tuple(masses))
        phi = vexp_bruteforce(g)
        assert cheeger_sandwich(lam.value, float(phi.value))
