#!/usr/bin/env python3
"""Walk through the star solvers on a small weighted star.

A star with a balanced leaf split (some subset of leaf masses sums to
exactly half the leaf total) hits the universal lower bound 1/(1-pi_0)
exactly; perturbing one leaf pushes the value strictly above it.
"""

from fractions import Fraction as F

from graphspread.graphs import StarGraph
from graphspread.lambda_inf import (oracle_small, star_closed_form,
                                    star_fptas, star_value_bracket)


def show(title, s):
    print(f"--- {title}")
    print("masses:", ", ".join(str(p) for p in s.pi))
    print(f"floor 1/(1-pi_0)   = {1 / (1 - s.pi[0])}")

    rep = star_closed_form(s)
    print(f"closed form        = {rep.value_fraction()}  ({rep.value:.6f})")

    lo, hi = star_value_bracket(s)
    print(f"certified bracket  = [{lo}, {hi}]  width {float(hi - lo):.2e}")

    iv = oracle_small(s)
    print(f"oracle interval    = [{iv.lo:.9f}, {iv.hi:.9f}]")

    apx = star_fptas(s, 1e-3)
    print(f"fptas (eps=1e-3)   = {apx.value_fraction()}  "
          f"grid step {apx.diagnostics['grid_step']:.2e}")
    print()


def main():
    # leaves 3,1,2 split as {3} vs {1,2}: balanced, value collapses to 2
    balanced = StarGraph.from_masses(
        [F(1, 2), F(3, 12), F(1, 12), F(2, 12)])
    show("balanced star (subset {3} = {1,2})", balanced)

    # no subset of 3,1,1 reaches 5/2: strictly above the floor
    tilted = StarGraph.from_masses(
        [F(1, 2), F(3, 10), F(1, 10), F(1, 10)])
    show("tilted star (3,1,1 has no half split)", tilted)


if __name__ == "__main__":
    main()
