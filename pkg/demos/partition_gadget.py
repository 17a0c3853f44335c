#!/usr/bin/env python3
"""Partition instances encoded as star spectra.

Deciding whether the star constant of the gadget equals beta (versus
exceeding it by the guaranteed gap) answers the partition question, so
an exact solver for stars doubles as a partition decider.  The same
masses with beta < 1 drive the spread variant, where YES instances hit
the spread value beta exactly.
"""

from fractions import Fraction as F

from graphspread.lambda_inf import star_value_bracket
from graphspread.reductions import (decide_partition, lambda_gap_bound,
                                    partition_bruteforce, to_lambda_star,
                                    to_spread_star)
from graphspread.spread import star_spread_exact

CASES = [(1, 1, 2), (1, 1, 1), (3, 5, 8), (2, 3, 4, 7), (1, 2, 4, 8)]


def main():
    beta = F(2)
    print(f"star-constant gadget at beta = {beta}")
    for parts in CASES:
        truth = partition_bruteforce(parts)
        star = to_lambda_star(parts, beta)
        lo, hi = star_value_bracket(star)
        bound = lambda_gap_bound(parts, beta)
        decided = decide_partition(parts, beta)
        mark = "==" if truth else ">="
        tail = f"{beta}" if truth else f"{beta} + {bound.gap}"
        print(f"  {str(parts):16s} partition={str(truth):5s} "
              f"decide={str(decided):5s} value {mark} {tail} "
              f"(bracket [{float(lo):.6f}, {float(hi):.6f}])")
        assert decided is truth

    beta = F(1, 2)
    print(f"\nspread gadget at beta = {beta}")
    for parts in CASES:
        truth = partition_bruteforce(parts)
        value = star_spread_exact(to_spread_star(parts, beta)).value_fraction()
        verdict = "hits" if value == beta else "misses"
        print(f"  {str(parts):16s} spread = {str(value):8s} "
              f"{verdict} beta  (partition={truth})")
        assert (value == beta) is truth


if __name__ == "__main__":
    main()
