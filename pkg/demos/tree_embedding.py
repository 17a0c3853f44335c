#!/usr/bin/env python3
"""Line versus plane embeddings of a weighted tree.

The 1-D spread optimum places the tree on a line, fully stretched, with
one vertex pinned at zero.  Allowing two dimensions lets the branches
fan out; on the claw with a weightless hub the plane buys a factor 9/8.
The numeric lift solver should land on the same 2-D value.
"""

import random
from fractions import Fraction as F

import numpy as np

from graphspread.graphs import TreeGraph, variance, variance_exact
from graphspread.mve import lift_solve, tree_mve2_embed, tree_mve2_value
from graphspread.spread import abs_oracle, tree_spread_fptas

from _util import random_tree


def claw():
    third = F(1, 3)
    return TreeGraph(4, ((0, 1), (0, 2), (0, 3)),
                     (F(0), third, third, third), allow_zero_mass=True)


def report(t, label):
    print(f"--- {label} (n={t.n})")
    line = abs_oracle(t)
    print(f"1-D spread (oracle) = {line.value_fraction()}")
    apx = tree_spread_fptas(t, F(1, 1000))
    w = apx.witness
    print(f"1-D spread (fptas)  = {apx.value_fraction()}  "
          f"witness variance {variance_exact(w, t)}, "
          f"zeros {sum(1 for x in w if x == 0)}")

    plane = tree_mve2_value(t)
    print(f"2-D value ({plane.diagnostics['case']} case) = "
          f"{plane.value_fraction()}")
    emb = tree_mve2_embed(t)
    stretch = [float(np.linalg.norm(emb[u] - emb[v])) for u, v in t.edges]
    print(f"2-D embed: edge lengths in [{min(stretch):.9f}, {max(stretch):.9f}], "
          f"variance {variance(emb, t):.9f}")

    sdp = lift_solve(t)
    print(f"lift solver objective = {sdp.objective():.6f} "
          f"(gap {abs(sdp.objective() - plane.value):.2e})")
    print()


def main():
    t = claw()
    report(t, "claw, weightless hub")
    ratio = tree_mve2_value(t).value_fraction() / abs_oracle(t).value_fraction()
    print(f"plane/line ratio on the claw = {ratio}\n")

    rng = random.Random(7)
    report(random_tree(rng, 9), "random tree")


if __name__ == "__main__":
    main()
