"""Closed real intervals with standard and limit-parameterized arithmetic.

Two arithmetics are provided side by side:

* ``std_arith`` -- textbook interval arithmetic, the exact range of
  ``a o b`` over the operand boxes for ``+ - * /``.
* ``mod_arith`` -- the two-limit arithmetic, where each interval is read as
  the family ``lo + w/n`` for ``n`` in ``[1, inf)`` and only the paired
  limits ``n -> inf`` (the lower end) and ``n -> 1`` (the upper end) are
  combined.

For sign-mixed products ``mod_arith`` is narrower than ``std_arith`` and does
*not* enclose the true range. That is intended behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DivisionByZeroInterval",
    "Interval",
    "InvalidEndpoints",
    "KINDS",
    "make",
    "midpoint_width",
    "mod_arith",
    "param_point",
    "std_arith",
]

KINDS = ("add", "sub", "mul", "div")


class InvalidEndpoints(ValueError):
    pass


class DivisionByZeroInterval(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidEndpoints(f"non-finite endpoint in [{lo}, {hi}]")
        if lo > hi:
            raise InvalidEndpoints(f"lower endpoint {lo} exceeds upper {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def issubset(self, other: "Interval", slack: float = 0.0) -> bool:
        return other.lo - slack <= self.lo and self.hi <= other.hi + slack

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def make(lo: float, hi: float) -> Interval:
    return Interval(lo, hi)


def midpoint_width(a: Interval) -> tuple[float, float]:
    """Return ``(centre, width)`` of ``a``."""
    return 0.5 * (a.lo + a.hi), a.hi - a.lo


def param_point(a: Interval, n: float) -> float:
    """Point ``lo + (hi - lo)/n`` of the interval.

    ``n = 1`` gives the upper endpoint; ``n = math.inf`` is accepted and
    returns the lower endpoint exactly.
    """
    if math.isnan(n) or n < 1:
        raise ValueError(f"parameter n must be >= 1, got {n}")
    if math.isinf(n):
        return a.lo
    if n == 1:
        return a.hi
    return a.lo + (a.hi - a.lo) / n


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown operation {kind!r}; expected one of {KINDS}")


def _check_divisor(b: Interval) -> None:
    if b.lo <= 0.0 <= b.hi:
        raise DivisionByZeroInterval(f"divisor {b} contains zero")


def _hull(values) -> Interval:
    return Interval(min(values), max(values))


def std_arith(kind: str, a: Interval, b: Interval) -> Interval:
    _check_kind(kind)
    if kind == "add":
        return Interval(a.lo + b.lo, a.hi + b.hi)
    if kind == "sub":
        return Interval(a.lo - b.hi, a.hi - b.lo)
    if kind == "mul":
        return _hull((a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi))
    _check_divisor(b)
    return _hull((a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi))


def mod_arith(kind: str, a: Interval, b: Interval) -> Interval:
    """Two-limit arithmetic: hull of the paired-limit combinations.

    add: (lo+lo, hi+hi), sub: (lo-hi, hi-lo), mul: (lo*lo, hi*hi),
    div: (lo/hi, hi/lo).
    """
    _check_kind(kind)
    a_low, a_up = param_point(a, math.inf), param_point(a, 1)
    b_low, b_up = param_point(b, math.inf), param_point(b, 1)
    if kind == "add":
        return _hull((a_low + b_low, a_up + b_up))
    if kind == "sub":
        return _hull((a_low - b_up, a_up - b_low))
    if kind == "mul":
        return _hull((a_low * b_low, a_up * b_up))
    _check_divisor(b)
    return _hull((a_low / b_up, a_up / b_low))
