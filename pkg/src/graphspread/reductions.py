"""Partition-to-star gadget generators and gap verifiers.

The equal-sum partition problem embeds into weighted stars twice: once so
that the Poincare-type constant crosses a threshold beta exactly for YES
instances, and once so that the spread constant equals beta exactly for YES
instances. Both gadgets are exact-rational; the verifiers compare solver
output against the brute-force partition answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .graphs import StarGraph
from .lambda_inf import star_fptas, star_value_bracket
from .report import BudgetError
from .spread import star_spread_exact

__all__ = [
    "PartitionInstance",
    "GapBound",
    "AccuracyError",
    "partition_bruteforce",
    "to_lambda_star",
    "to_spread_star",
    "to_vexp_star",
    "lambda_gap_bound",
    "decide_partition",
    "spread_gap_check",
]


class AccuracyError(ValueError):
    """Solver accuracy is insufficient to separate the decision gap."""


@dataclass(frozen=True)
class PartitionInstance:
    """A multiset of positive integers, stored sorted."""

    p: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted(int(x) for x in self.p))
        if not parts:
            raise ValueError("need at least one part")
        if any(x < 1 for x in parts):
            raise ValueError("parts must be positive integers")
        object.__setattr__(self, "p", parts)

    @property
    def total(self) -> int:
        return sum(self.p)


@dataclass(frozen=True)
class GapBound:
    """Predicted minimum distance of a NO instance's value from beta."""

    beta: Fraction
    total: int
    gap: Fraction

    def __post_init__(self):
        if self.gap <= 0:
            raise ValueError("gap bound must be positive")


def _as_instance(p) -> PartitionInstance:
    return p if isinstance(p, PartitionInstance) else PartitionInstance(tuple(p))


def partition_bruteforce(p, max_parts: int = 24) -> bool:
    """True iff the multiset splits into two equal-sum halves (exact)."""
    inst = _as_instance(p)
    if len(inst.p) > max_parts:
        raise BudgetError(f"{len(inst.p)} parts exceed max_parts={max_parts}")
    total = inst.total
    if total % 2:
        return False
    reach = 1
    for x in inst.p:
        reach |= reach << x
    return bool(reach >> (total // 2) & 1)


def to_lambda_star(p, beta) -> StarGraph:
    """Star whose Poincare-type constant is <= beta iff the instance splits.

    Center mass (beta-1)/beta, leaf j mass p_j/(beta * sum p).
    """
    inst = _as_instance(p)
    beta = Fraction(beta)
    if beta <= 1:
        raise ValueError("beta must be > 1")
    total = inst.total
    masses = [(beta - 1) / beta] + [Fraction(x, 1) / (beta * total)
                                    for x in inst.p]
    return StarGraph.from_masses(masses)


def to_spread_star(p, beta) -> StarGraph:
    """Star whose spread constant equals beta exactly iff the instance splits.

    Center mass 1 - beta, leaf j mass beta * p_j / sum p.
    """
    inst = _as_instance(p)
    beta = Fraction(beta)
    if not (0 < beta < 1):
        raise ValueError("beta must be in (0, 1)")
    total = inst.total
    masses = [1 - beta] + [beta * Fraction(x, total) for x in inst.p]
    return StarGraph.from_masses(masses)


def to_vexp_star(p, beta) -> StarGraph:
    """Vertex-expansion gadget; reuses the lambda-star distribution.

    No closed-form gap is claimed for this family; instances are checked
    against the exhaustive solver.
    """
    return to_lambda_star(p, beta)


def lambda_gap_bound(p, beta) -> GapBound:
    """Lower bound on lambda - beta for NO instances of the lambda gadget:
    min{(beta-1)/beta, 1/beta} / (3 (sum p)^2)."""
    inst = _as_instance(p)
    beta = Fraction(beta)
    if beta <= 1:
        raise ValueError("beta must be > 1")
    total = inst.total
    gap = min((beta - 1) / beta, 1 / beta) / (3 * total * total)
    return GapBound(beta=beta, total=total, gap=gap)


def decide_partition(p, beta, solver: str = "oracle", eps=None) -> bool:
    """Answer the partition question through the lambda-star gadget.

    solver "oracle" evaluates the star through a certified rational
    enclosure and compares exactly; solver "fptas" runs the approximation
    scheme with eps small enough to clear the decision gap (default
    gap/(4 beta)) and certifies the answer from the [value/(1+eps), value]
    enclosure. Either way an enclosure straddling the threshold raises
    AccuracyError.
    """
    inst = _as_instance(p)
    beta = Fraction(beta)
    star = to_lambda_star(inst, beta)
    threshold = beta + lambda_gap_bound(inst, beta).gap / 2
    if solver == "oracle":
        lo, hi = star_value_bracket(star)
        if hi <= threshold:
            return True
        if lo > threshold:
            return False
        raise AccuracyError(
            f"enclosure [{float(lo):.9g}, {float(hi):.9g}] straddles "
            f"{float(threshold):.9g}")
    if solver == "fptas":
        if eps is None:
            eps = lambda_gap_bound(inst, beta).gap / (4 * beta)
        rep = star_fptas(star, float(eps))
        hi = Fraction(rep.value)
        lo = hi / (1 + Fraction(rep.eps))
        if hi <= threshold:
            return True
        if lo > threshold:
            return False
        raise AccuracyError(
            f"enclosure [{float(lo):.9g}, {float(hi):.9g}] straddles "
            f"{float(threshold):.9g}; decrease eps")
    raise ValueError(f"unknown solver {solver!r}")


def spread_gap_check(p, beta) -> bool:
    """True iff the spread gadget agrees with the brute-force answer.

    YES instances must give spread exactly beta; NO instances must land
    strictly below (the gadget's value never exceeds 1 - center mass = beta).
    """
    inst = _as_instance(p)
    beta = Fraction(beta)
    star = to_spread_star(inst, beta)
    value = star_spread_exact(star).value_fraction()
    if value > beta:
        raise AssertionError(
            f"gadget value {value} exceeds its cap {beta}; solver bug")
    return (value == beta) == partition_bruteforce(inst)
