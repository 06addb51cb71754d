"""Quadratic-form matrices for ``b_n`` and exact positive-semidefiniteness.

For order ``d >= 2`` the L-operator value is a quadratic form in the state
vector: ``b_n = v_n^T Q_n v_n`` with ``Q_n = Q0 + n*Q1``.  ``Q_n`` is built
from the first row ``c(n)`` of the companion matrix as
``e1 e1^T - (c e2^T + e2 c^T)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import _poly
from .core import Matrix, RecurrenceSpec, as_rational, matrix_product_prefix

__all__ = [
    "DEFAULT_TOL",
    "SymmetricMatrix",
    "QFormPair",
    "EigenBound",
    "PSDResult",
    "PSDTail",
    "build_qform",
    "q_at",
    "quadratic_value",
    "determinant",
    "psd_exact",
    "d2_psd_condition",
    "char_poly_matrix",
    "lambda_min_bound",
    "threshold_N",
    "threshold_from_bounds",
    "psd_tail",
    "build_R",
]

DEFAULT_TOL = Fraction(1, 2**40)


@dataclass(frozen=True)
class SymmetricMatrix:
    """Exactly symmetric matrix; only the upper triangle is stored (row-major)."""

    dim: int
    upper: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.upper) != self.dim * (self.dim + 1) // 2:
            raise ValueError("upper triangle has the wrong length")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "SymmetricMatrix":
        d = len(rows)
        full = [[as_rational(x) for x in r] for r in rows]
        if any(len(r) != d for r in full):
            raise ValueError("matrix must be square")
        for i in range(d):
            for j in range(i):
                if full[i][j] != full[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        return cls(d, tuple(full[i][j] for i in range(d) for j in range(i, d)))

    @classmethod
    def from_matrix(cls, m: Matrix) -> "SymmetricMatrix":
        return cls.from_rows(m.row_list())

    def _offset(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return i * self.dim - i * (i - 1) // 2 + (j - i)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.upper[self._offset(*ij)]

    def rows(self) -> list[list[Fraction]]:
        return [[self[i, j] for j in range(self.dim)] for i in range(self.dim)]

    def to_matrix(self) -> Matrix:
        return Matrix.from_rows(self.rows())

    def __add__(self, other: "SymmetricMatrix") -> "SymmetricMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SymmetricMatrix(self.dim, tuple(x + y for x, y in zip(self.upper, other.upper)))

    def scale(self, c) -> "SymmetricMatrix":
        c = as_rational(c)
        return SymmetricMatrix(self.dim, tuple(c * x for x in self.upper))

    def form(self, v: Sequence) -> Fraction:
        """``v^T S v``."""
        if len(v) != self.dim:
            raise ValueError(f"vector has dimension {len(v)}, expected {self.dim}")
        total = Fraction(0)
        for i in range(self.dim):
            total += self[i, i] * v[i] * v[i]
            for j in range(i + 1, self.dim):
                total += 2 * self[i, j] * v[i] * v[j]
        return total

    def submatrix(self, idx: Sequence[int]) -> list[list[Fraction]]:
        return [[self[i, j] for j in idx] for i in idx]


@dataclass(frozen=True)
class QFormPair:
    q0: SymmetricMatrix
    q1: SymmetricMatrix

    @property
    def order(self) -> int:
        return self.q0.dim


def _qform_from_row(c: Sequence[Fraction], lead: Fraction) -> SymmetricMatrix:
    d = len(c)
    rows = [[Fraction(0)] * d for _ in range(d)]
    rows[0][0] += lead
    for i in range(d):
        rows[i][1] -= c[i] / 2
        rows[1][i] -= c[i] / 2
    return SymmetricMatrix.from_rows(rows)


def build_qform(spec: RecurrenceSpec, r=1) -> QFormPair:
    """``Q0, Q1`` with ``b_n = v_n^T (Q0 + n*Q1) v_n`` for ``n >= d-1``.

    With ``r != 1`` the pair represents ``a[n]**2 - r*a[n+1]*a[n-1]``
    instead, the quantity behind r-factor log-concavity.
    """
    if spec.order < 2:
        raise ValueError("the quadratic form needs order >= 2 (there is no a[n-1] slot in v_n for d = 1)")
    r = as_rational(r)
    return QFormPair(
        q0=_qform_from_row([r * x for x in spec.q], Fraction(1)),
        q1=_qform_from_row([r * x for x in spec.p], Fraction(0)),
    )


def q_at(pair: QFormPair, n: int) -> SymmetricMatrix:
    if n < 0:
        raise ValueError("n must be >= 0")
    return pair.q0 + pair.q1.scale(n)


def quadratic_value(pair: QFormPair, v: Sequence, n: int) -> Fraction:
    return q_at(pair, n).form(v)


def determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination on integers."""
    k = len(rows)
    if k == 0:
        return Fraction(1)
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    m = [[int(x * den) for x in r] for r in rows]
    sign, prev = 1, 1
    for i in range(k - 1):
        if m[i][i] == 0:
            for s in range(i + 1, k):
                if m[s][i] != 0:
                    m[i], m[s] = m[s], m[i]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        piv = m[i][i]
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                m[r][c] = (m[r][c] * piv - m[r][i] * m[i][c]) // prev
        prev = piv
    return Fraction(sign * m[k - 1][k - 1], den**k)


@dataclass(frozen=True)
class PSDResult:
    """Outcome of the principal-minor test; truthy when the matrix is PSD."""

    is_psd: bool
    minors_checked: int
    violated_minor: tuple[int, ...] | None = None
    violated_value: Fraction | None = None

    def __bool__(self) -> bool:
        return self.is_psd


def psd_exact(S: SymmetricMatrix) -> PSDResult:
    """Decide ``S >= 0`` by checking all ``2**d - 1`` principal minors."""
    if S.dim > 10:
        raise ValueError("psd_exact is limited to dimension <= 10")
    checked = 0
    for size in range(1, S.dim + 1):
        for idx in combinations(range(S.dim), size):
            checked += 1
            value = determinant(S.submatrix(idx))
            if value < 0:
                return PSDResult(False, checked, idx, value)
    return PSDResult(True, checked)


def d2_psd_condition(spec: RecurrenceSpec, n: int) -> bool:
    """Closed-form PSD test of ``Q_n`` for order two."""
    if spec.order != 2:
        raise ValueError("d2_psd_condition applies to order-2 recurrences only")
    c0, c1 = spec.coefficient(0, n), spec.coefficient(1, n)
    return c1 <= 0 and c0 * c0 <= -4 * c1


def char_poly_matrix(S: SymmetricMatrix) -> list[Fraction]:
    """Coefficients of ``det(x*I - S)`` (monic, highest first), Faddeev-LeVerrier."""
    d = S.dim
    a = S.rows()
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * d for _ in range(d)]
    c = Fraction(1)
    for k in range(1, d + 1):
        # M_k = A M_{k-1} + c_{k-1} I ; c_k = -tr(A M_k)/k
        m = [[sum((a[i][t] * m[t][j] for t in range(d)), Fraction(0)) + (c if i == j else 0)
              for j in range(d)] for i in range(d)]
        am_trace = sum((a[i][t] * m[t][i] for i in range(d) for t in range(d)), Fraction(0))
        c = -am_trace / k
        coeffs.append(c)
    return coeffs


@dataclass(frozen=True)
class EigenBound:
    lower: Fraction
    upper: Fraction
    target: str = "lambda_min"

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower


def _below_spectrum(derivs: list[list[Fraction]], x: Fraction) -> bool:
    # x < lambda_min  iff  p^(k)(x) has strict sign (-1)^(deg - k) for every k;
    # the Taylor expansion of p about x then has no sign change to the left.
    d = len(derivs) - 1
    for k, poly in enumerate(derivs):
        v = _poly.evaluate(poly, x)
        if v == 0 or (v > 0) != ((d - k) % 2 == 0):
            return False
    return True


def lambda_min_bound(S: SymmetricMatrix, tol=DEFAULT_TOL, target: str = "lambda_min") -> EigenBound:
    """Rational bracket ``[lower, upper]`` around the smallest eigenvalue of ``S``."""
    tol = as_rational(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    radius = max(sum(abs(x) for x in row) for row in S.rows())
    lo, hi = -radius, radius
    if radius == 0:
        return EigenBound(Fraction(0), Fraction(0), target)
    derivs = [char_poly_matrix(S)]
    while len(derivs[-1]) > 1:
        derivs.append(_poly.derivative(derivs[-1]))
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _below_spectrum(derivs, mid):
            lo = mid
        else:
            hi = mid
    return EigenBound(lo, hi, target)


def threshold_from_bounds(lower0: Fraction, lower1: Fraction) -> int | None:
    """``ceil(max(0, -lower0)/lower1) + 1`` when ``lower1 > 0``."""
    if lower1 <= 0:
        return None
    return math.ceil(max(Fraction(0), -lower0) / lower1) + 1


def threshold_N(pair: QFormPair, tol=DEFAULT_TOL) -> int | None:
    """Index beyond which ``Q_n`` is PSD, from certified eigenvalue lower bounds.

    Returns ``None`` when the smallest eigenvalue of ``Q1`` cannot be
    certified positive.  Any ``Q1`` built from a recurrence has a zero in
    its (0, 0) entry, so this route only fires for hand-made pairs.
    """
    b1 = lambda_min_bound(pair.q1, tol, "lambda_min(Q1)")
    if b1.lower <= 0:
        return None
    b0 = lambda_min_bound(pair.q0, tol, "lambda_min(Q0)")
    return threshold_from_bounds(b0.lower, b1.lower)


def _interpolate(xs: Sequence[int], ys: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients (highest first) of the polynomial through the points."""
    k = len(xs)
    coeffs = [Fraction(0)] * k
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [a - xj * b for a, b in zip(basis + [Fraction(0)], [Fraction(0)] + basis)]
            denom *= xi - xj
        scale = yi / denom
        for t in range(k):
            coeffs[t] += scale * basis[t]
    return coeffs


@dataclass(frozen=True)
class PSDTail:
    """``Q_n`` is PSD for every integer ``n >= start``."""

    start: int
    minor_polys: tuple[tuple[tuple[int, ...], tuple[Fraction, ...]], ...]


def _last_negative_integer(poly: list[Fraction], floor_at: int) -> int | None | bool:
    """Largest integer ``n >= floor_at`` with ``poly(n) < 0``.

    Returns ``None`` if there is none and ``False`` if negative values
    persist for arbitrarily large ``n``.
    """
    poly = _poly._trim(poly)
    if all(c == 0 for c in poly):
        return None
    if poly[0] < 0:
        return False
    roots = _poly.real_root_intervals(poly, Fraction(1, 4))
    if not roots:
        return None
    # Integers just outside each enclosure are probed too: between two roots
    # the sign is constant, so the top integer of a gap decides the gap.
    for lo, hi in roots:  # descending
        for m in range(math.floor(hi), math.floor(lo) - 2, -1):
            if m < floor_at:
                return None
            if _poly.evaluate(poly, m) < 0:
                return m
    return None


def psd_tail(pair: QFormPair, floor_at: int = 0) -> PSDTail | None:
    """Smallest ``N >= floor_at`` with ``Q_n`` PSD for all integers ``n >= N``.

    Each principal minor of ``Q0 + n*Q1`` is a polynomial in ``n`` of degree
    at most its size; it is recovered exactly by interpolation and its
    negative integers located by real-root isolation.  ``None`` means some
    minor is negative for infinitely many ``n``.
    """
    d = pair.order
    start = floor_at
    polys = []
    for size in range(1, d + 1):
        xs = list(range(size + 1))
        for idx in combinations(range(d), size):
            ys = [determinant(q_at(pair, x).submatrix(idx)) for x in xs]
            poly = _interpolate(xs, ys)
            polys.append((idx, tuple(poly)))
            last = _last_negative_integer(poly, floor_at)
            if last is False:
                return None
            if last is not None:
                start = max(start, last + 1)
    return PSDTail(start, tuple(polys))


def build_R(spec: RecurrenceSpec, n: int, pair: QFormPair | None = None) -> SymmetricMatrix:
    """``Pi_n^T Q_{d-1+n} Pi_n``, so that ``v_{d-1}^T R_n v_{d-1} = b_{d-1+n}``."""
    if pair is None:
        pair = build_qform(spec)
    prod = matrix_product_prefix(spec, n)
    q = q_at(pair, spec.order - 1 + n).to_matrix()
    return SymmetricMatrix.from_matrix(prod.T @ q @ prod)
