#!/usr/bin/env python3
"""Vertex expansion: brute force, the tree recursion, and the sandwich.

For every cut the brute solver weighs the inner boundary against the
smaller side.  On uniform-mass trees a subtree recursion gets the same
number without enumerating cuts.  The star constant pins expansion from
both sides: phi^V/2 <= 1 - 1/lambda <= 2 phi^V.
"""

import random
from fractions import Fraction as F

from graphspread.graphs import StarGraph, TreeGraph
from graphspread.lambda_inf import cheeger_sandwich, star_closed_form
from graphspread.vexp import vexp_bruteforce, vexp_tree_uniform

from _util import random_tree


def main():
    rng = random.Random(3)
    print("uniform trees, recursion vs brute force:")
    for n in (5, 9, 14):
        shape = random_tree(rng, n)
        t = TreeGraph(n=n, edges=shape.edges, pi=(F(1, n),) * n)
        dp = vexp_tree_uniform(t)
        brute = vexp_bruteforce(t)
        assert dp.value_fraction() == brute.value_fraction()
        print(f"  n={n:2d}: phi^V = {dp.value_fraction()}  "
              f"witness cut {sorted(brute.witness)}")

    print("\nstars, sandwich between expansion and the star constant:")
    for n in (3, 5, 8):
        s = StarGraph.from_masses([F(1, n)] * n)
        lam = float(star_closed_form(s).value)
        phi = float(vexp_bruteforce(s).value)
        ok = cheeger_sandwich(lam, phi)
        print(f"  K(1,{n - 1}): phi^V = {phi:.4f}, lambda = {lam:.4f}, "
              f"phi/2 <= 1 - 1/lambda <= 2 phi: {ok}")
        assert ok


if __name__ == "__main__":
    main()
