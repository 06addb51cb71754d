"""The log-concave operator, Turán ratios and the brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import RecurrenceSpec, SequenceWindow, as_rational, generate

__all__ = [
    "DEFAULT_DEPTH",
    "DEFAULT_HORIZON",
    "R_FACTOR_DEFAULT",
    "OracleLevel",
    "OracleReport",
    "apply_L",
    "iterate_L",
    "turan_ratio",
    "first_violation",
    "oracle_inf_lc",
    "exceeds_r0",
    "r_factor_check",
]

DEFAULT_DEPTH = 4
DEFAULT_HORIZON = 64

# Smallest "nice" rational above (3 + sqrt 5)/2 = 2.6180...
R_FACTOR_DEFAULT = Fraction(29, 11)


def apply_L(window: SequenceWindow) -> SequenceWindow:
    """``b[k] = a[k]**2 - a[k+1]*a[k-1]`` over the interior of ``window``."""
    t = window.terms
    if len(t) < 3:
        raise ValueError("apply_L needs a window of at least 3 terms")
    return SequenceWindow(
        window.start + 1,
        tuple(t[j] * t[j] - t[j + 1] * t[j - 1] for j in range(1, len(t) - 1)),
        window.exact,
    )


def iterate_L(window: SequenceWindow, i: int) -> SequenceWindow:
    if i < 0:
        raise ValueError("i must be >= 0")
    if len(window) < 2 * i + 1:
        raise ValueError(f"need at least {2 * i + 1} terms to apply L {i} times")
    for _ in range(i):
        window = apply_L(window)
    return window


def turan_ratio(window: SequenceWindow, n: int):
    """``a[n-1]*a[n+1] / a[n]**2``, or ``None`` when ``a[n] == 0``."""
    lo, mid, hi = window[n - 1], window[n], window[n + 1]
    if mid == 0:
        return None
    return Fraction(lo) * Fraction(hi) / (Fraction(mid) * Fraction(mid))


def first_violation(window: SequenceWindow) -> int | None:
    """Smallest index holding a strictly negative term (zero passes)."""
    for n, x in window.items():
        if x < 0:
            return n
    return None


@dataclass(frozen=True)
class OracleLevel:
    level: int
    window: SequenceWindow
    first_negative: int | None

    @property
    def value_at_first_negative(self):
        return None if self.first_negative is None else self.window[self.first_negative]


@dataclass(frozen=True)
class OracleReport:
    """Every iterate ``L^i(a)`` for ``i = 0..depth`` on ``a[0..horizon]``.

    A negative entry at some level refutes ``i``-fold log-concavity outright.
    A clean report says nothing about indices beyond the horizon.
    """

    depth: int
    horizon: int
    levels: tuple[OracleLevel, ...]

    def first_witness(self, max_level: int | None = None) -> OracleLevel | None:
        """Lowest level ``>= 1`` carrying a negative entry."""
        for lv in self.levels[1:]:
            if max_level is not None and lv.level > max_level:
                break
            if lv.first_negative is not None:
                return lv
        return None

    @property
    def clean(self) -> bool:
        return self.first_witness() is None


def oracle_inf_lc(spec: RecurrenceSpec, depth: int = DEFAULT_DEPTH,
                  horizon: int = DEFAULT_HORIZON) -> OracleReport:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    need = spec.order - 1 + 2 * depth
    if horizon < need:
        raise ValueError(f"horizon {horizon} too small for depth {depth}; need >= {need}")
    return oracle_on_window(generate(spec, horizon), depth, horizon)


def oracle_on_window(window: SequenceWindow, depth: int, horizon: int | None = None) -> OracleReport:
    if len(window) < 2 * depth + 1:
        raise ValueError(f"window of {len(window)} terms is too short for depth {depth}")
    levels = [OracleLevel(0, window, first_violation(window))]
    for i in range(1, depth + 1):
        window = apply_L(window)
        levels.append(OracleLevel(i, window, first_violation(window)))
    if horizon is None:
        horizon = levels[0].window.stop - 1
    return OracleReport(depth, horizon, tuple(levels))


def exceeds_r0(r) -> bool:
    """Exact test of ``r >= (3 + sqrt 5)/2``.

    ``2r - 3 >= sqrt 5`` iff ``2r - 3 >= 0`` and ``(2r - 3)**2 >= 5``; the
    bound is irrational so equality never happens for rational ``r``.
    """
    t = 2 * as_rational(r) - 3
    return t >= 0 and t * t >= 5


def r_factor_check(window: SequenceWindow, r=R_FACTOR_DEFAULT) -> int | None:
    """First interior index where ``a[n]**2 >= r*a[n+1]*a[n-1]`` fails."""
    t = window.terms
    if len(t) < 3:
        raise ValueError("r_factor_check needs a window of at least 3 terms")
    r = as_rational(r)
    for j in range(1, len(t) - 1):
        if t[j] * t[j] < r * t[j + 1] * t[j - 1]:
            return window.start + j
    return None
