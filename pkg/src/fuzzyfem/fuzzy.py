"""Triangular fuzzy numbers and alpha-indexed interval families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .interval import Interval, mod_arith

__all__ = [
    "DEFAULT_ALPHA_LEVELS",
    "FuzzyResult",
    "MalformedLevels",
    "NESTING_SLACK",
    "NestingViolation",
    "TriangularFuzzyNumber",
    "alpha_cut",
    "from_samples",
    "level_arith",
    "membership",
    "to_polyline",
    "uniform_levels",
    "validate_levels",
]

NESTING_SLACK = 1e-9


class MalformedLevels(ValueError):
    pass


class NestingViolation(ValueError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


def uniform_levels(count: int = 11) -> tuple[float, ...]:
    if count < 2:
        raise MalformedLevels("an alpha grid needs at least the levels 0 and 1")
    # round() keeps 0.1, 0.2, ... as their shortest decimal form
    return tuple(round(float(a), 12) for a in np.linspace(0.0, 1.0, count))


DEFAULT_ALPHA_LEVELS = uniform_levels(11)


@dataclass(frozen=True)
class TriangularFuzzyNumber:
    left: float
    peak: float
    right: float

    def __post_init__(self):
        vals = tuple(float(v) for v in (self.left, self.peak, self.right))
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite triangular fuzzy number {vals}")
        if not vals[0] <= vals[1] <= vals[2]:
            raise ValueError(f"need left <= peak <= right, got {vals}")
        for name, v in zip(("left", "peak", "right"), vals):
            object.__setattr__(self, name, v)

    @classmethod
    def crisp(cls, value: float) -> "TriangularFuzzyNumber":
        return cls(value, value, value)

    @property
    def is_crisp(self) -> bool:
        return self.left == self.right

    def as_list(self) -> list[float]:
        return [self.left, self.peak, self.right]


def membership(t: TriangularFuzzyNumber, x: float) -> float:
    if x < t.left or x > t.right:
        return 0.0
    if x == t.peak:
        return 1.0
    if x < t.peak:
        return (x - t.left) / (t.peak - t.left)
    return (t.right - x) / (t.right - t.peak)


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def alpha_cut(t: TriangularFuzzyNumber, alpha: float) -> Interval:
    _check_alpha(alpha)
    # endpoints pinned so that alpha = 0 and alpha = 1 are exact
    if alpha == 0.0:
        return Interval(t.left, t.right)
    if alpha == 1.0:
        return Interval(t.peak, t.peak)
    # clamp at the peak: rounding must not push a cut past the core
    lo = min(t.left + (t.peak - t.left) * alpha, t.peak)
    hi = max(t.right - (t.right - t.peak) * alpha, t.peak)
    return Interval(lo, hi)


def level_arith(kind: str, a: TriangularFuzzyNumber, b: TriangularFuzzyNumber,
                alpha: float) -> Interval:
    """Two-limit interval arithmetic applied to the alpha-cuts of ``a`` and ``b``."""
    return mod_arith(kind, alpha_cut(a, alpha), alpha_cut(b, alpha))


@dataclass(frozen=True)
class FuzzyResult:
    """Nested family of intervals indexed by ascending membership levels.

    Build through :func:`from_samples`, which validates the grid and the
    nesting.
    """

    levels: tuple[float, ...]
    cuts: tuple[Interval, ...]

    def cut(self, alpha: float) -> Interval:
        for a, c in zip(self.levels, self.cuts):
            if a == alpha:
                return c
        raise KeyError(f"alpha {alpha} is not on the grid {self.levels}")

    @property
    def support(self) -> Interval:
        return self.cuts[0]

    @property
    def core(self) -> Interval:
        return self.cuts[-1]


def validate_levels(levels: Sequence[float]) -> tuple[float, ...]:
    levels = tuple(float(a) for a in levels)
    if len(levels) < 2:
        raise MalformedLevels("need at least two alpha levels")
    if levels[0] != 0.0 or levels[-1] != 1.0:
        raise MalformedLevels(f"alpha grid must start at 0 and end at 1, got {levels}")
    for a0, a1 in zip(levels, levels[1:]):
        if not a1 > a0:
            raise MalformedLevels(f"alpha grid not strictly ascending at {a0}, {a1}")
    return levels


def from_samples(levels: Sequence[float], cuts: Sequence[Interval],
                 slack: float = NESTING_SLACK) -> FuzzyResult:
    levels = validate_levels(levels)
    cuts = list(cuts)
    if len(cuts) != len(levels):
        raise MalformedLevels(f"{len(levels)} levels but {len(cuts)} cuts")
    out = [cuts[0]]
    for i in range(1, len(cuts)):
        prev, cur = out[-1], cuts[i]
        lo, hi = cur.lo, cur.hi
        if lo < prev.lo:
            if prev.lo - lo > slack:
                raise NestingViolation(
                    f"lower end drops from {prev.lo} at alpha={levels[i - 1]} "
                    f"to {lo} at alpha={levels[i]}", pair=(levels[i - 1], levels[i]))
            lo = prev.lo
        if hi > prev.hi:
            if hi - prev.hi > slack:
                raise NestingViolation(
                    f"upper end rises from {prev.hi} at alpha={levels[i - 1]} "
                    f"to {hi} at alpha={levels[i]}", pair=(levels[i - 1], levels[i]))
            hi = prev.hi
        if lo > hi:
            lo = hi = 0.5 * (lo + hi)
        out.append(Interval(lo, hi) if (lo, hi) != (cur.lo, cur.hi) else cur)
    return FuzzyResult(levels, tuple(out))


def to_polyline(f: FuzzyResult) -> list[tuple[float, float]]:
    """Membership outline: left branch upward in alpha, then right branch downward."""
    left = [(c.lo, a) for a, c in zip(f.levels, f.cuts)]
    right = [(c.hi, a) for a, c in zip(reversed(f.levels), reversed(f.cuts))]
    return left + right
