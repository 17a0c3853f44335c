"""Solver result plumbing: a value plus its certification status and an
optional witness, with free-form diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional


class BudgetError(ValueError):
    """Raised when an instance exceeds an exhaustive solver's size budget."""


@dataclass
class SolveReport:
    value: float
    status: str  # "exact" | "interval" | "approx"
    witness: Any = None
    lo: Optional[float] = None
    hi: Optional[float] = None
    eps: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in ("exact", "interval", "approx"):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "interval":
            if self.lo is None or self.hi is None or self.lo > self.hi + 1e-15:
                raise ValueError("interval status needs lo <= hi")
        if self.status == "approx":
            if self.eps is None or self.eps <= 0:
                raise ValueError("approx status needs eps > 0")

    @classmethod
    def exact(cls, value, witness=None, **diagnostics) -> "SolveReport":
        exact_val = None
        if isinstance(value, Fraction):
            exact_val = value
            value = float(value)
        rep = cls(value=value, status="exact", witness=witness,
                  diagnostics=dict(diagnostics))
        if exact_val is not None:
            rep.diagnostics.setdefault("value_exact", str(exact_val))
        return rep

    @classmethod
    def interval(cls, lo: float, hi: float, witness=None, **diagnostics) -> "SolveReport":
        return cls(value=hi, status="interval", witness=witness, lo=lo, hi=hi,
                   diagnostics=dict(diagnostics))

    @classmethod
    def approx(cls, value: float, eps: float, witness=None, **diagnostics) -> "SolveReport":
        return cls(value=value, status="approx", witness=witness, eps=eps,
                   diagnostics=dict(diagnostics))

    def value_fraction(self) -> Optional[Fraction]:
        """The exact value when the solver recorded one."""
        s = self.diagnostics.get("value_exact")
        return Fraction(s) if s is not None else None
