"""Exact univariate polynomial helpers over Fractions.

Coefficients are stored highest degree first: ``[1, -3, 2]`` is
``x**2 - 3x + 2``.
"""

from __future__ import annotations

from fractions import Fraction


def evaluate(coeffs, x) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def derivative(coeffs):
    deg = len(coeffs) - 1
    return [c * (deg - i) for i, c in enumerate(coeffs[:-1])]


def _trim(coeffs):
    i = 0
    while i < len(coeffs) - 1 and coeffs[i] == 0:
        i += 1
    return list(coeffs[i:])


def _rem(num, den):
    num = [Fraction(c) for c in _trim(num)]
    den = _trim(den)
    while len(num) >= len(den) and any(num):
        f = num[0] / den[0]
        for i in range(len(den)):
            num[i] -= f * den[i]
        num.pop(0)
    return _trim(num) if num else [Fraction(0)]


def sturm_sequence(coeffs):
    seq = [list(map(Fraction, _trim(coeffs)))]
    seq.append(derivative(seq[0]))
    while True:
        r = _rem(seq[-2], seq[-1])
        if len(r) == 1 and r[0] == 0:
            return seq
        seq.append([-c for c in r])


def _sign_changes(values):
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq, lo, hi) -> int:
    """Distinct real roots in ``(lo, hi]`` from a Sturm sequence."""
    return (_sign_changes([evaluate(p, lo) for p in seq])
            - _sign_changes([evaluate(p, hi) for p in seq]))


def root_bound(coeffs) -> Fraction:
    """Cauchy bound: every root has modulus below the returned value."""
    coeffs = _trim(coeffs)
    lead = abs(Fraction(coeffs[0]))
    return 1 + max((abs(Fraction(c)) / lead for c in coeffs[1:]), default=Fraction(0))


def real_root_intervals(coeffs, width) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(lo, hi]`` each holding one distinct real root.

    Intervals are refined by bisection until ``hi - lo <= width``; a root
    that is hit exactly collapses to ``(r, r)``.  Sorted descending.
    """
    coeffs = _trim(coeffs)
    if len(coeffs) == 1:
        return []
    seq = sturm_sequence(coeffs)
    bound = root_bound(coeffs)
    out = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        k = count_roots(seq, lo, hi)
        if k == 0:
            continue
        if k == 1 and hi - lo <= width:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if k == 1 and evaluate(coeffs, mid) == 0:
            out.append((mid, mid))
            continue
        stack.append((lo, mid))
        stack.append((mid, hi))
    out.sort(key=lambda iv: iv[1], reverse=True)
    return out
