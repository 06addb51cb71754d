"""Exact recurrence instances, companion matrices and term generation.

A recurrence of order ``d`` with coefficients linear in ``n``::

    a[n+1] = sum_{k<d} (p[k]*n + q[k]) * a[n-k],    n >= d-1

is advanced one step by the companion matrix ``M_n = n*A + B`` acting on the
state vector ``v_n = (a[n], a[n-1], ..., a[n-d+1])``.  Everything here uses
:class:`fractions.Fraction`; no floating point enters this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "parse_rational",
    "MAX_ORDER",
    "MAX_TERMS",
    "SpecError",
    "RecurrenceSpec",
    "Matrix",
    "SequenceWindow",
    "as_rational",
    "parse_spec",
    "format_spec",
    "companion_pair",
    "companion_at",
    "generate",
    "state_vector",
    "matrix_product_prefix",
]

MAX_ORDER = 10
MAX_TERMS = 10**5


class SpecError(ValueError):
    """Malformed or invalid recurrence description."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return _parse_rational(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def _parse_rational(token: str, line: int | None = None) -> Fraction:
    m = _RATIONAL_RE.match(token.replace(" ", "").replace("−", "-"))
    if m is None:
        raise SpecError(f"not a rational number: {token!r}", line)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise SpecError(f"zero denominator in {token!r}", line)
    return Fraction(num, den)


parse_rational = _parse_rational


@dataclass(frozen=True)
class RecurrenceSpec:
    """Order, coefficient pairs ``(p[k], q[k])`` and initial data ``a[0..d-1]``."""

    order: int
    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]
    initial: tuple[Fraction, ...]

    def __post_init__(self):
        if not isinstance(self.order, int) or not 1 <= self.order <= MAX_ORDER:
            raise SpecError(f"order must be an integer in [1, {MAX_ORDER}], got {self.order!r}")
        for name in ("p", "q", "initial"):
            values = tuple(as_rational(v) for v in getattr(self, name))
            if len(values) != self.order:
                raise SpecError(f"{name} has {len(values)} entries, expected {self.order}")
            object.__setattr__(self, name, values)

    @classmethod
    def of(cls, p: Sequence, q: Sequence, initial: Sequence) -> "RecurrenceSpec":
        return cls(len(initial), tuple(p), tuple(q), tuple(initial))

    def coefficient(self, k: int, n: int) -> Fraction:
        """``p[k]*n + q[k]``."""
        return self.p[k] * n + self.q[k]

    @property
    def is_constant(self) -> bool:
        return all(pk == 0 for pk in self.p)


_ASSIGN_RE = re.compile(r"^\s*([A-Za-z_]+)\s*=\s*(.+?)\s*$")


def parse_spec(text: str) -> RecurrenceSpec:
    """Parse the plain-text recurrence format.

    One or more ``key = value`` assignments per line, separated by ``;``.
    Keys are ``order``, ``p``, ``q`` and ``initial``; list values are written
    ``[r, r, ...]`` where each ``r`` is an integer or ``int/posint``.  ``#``
    starts a comment.

    >>> parse_spec("order=2; p=[0,-1]; q=[2,-1]; initial=[2,3]").p
    (Fraction(0, 1), Fraction(-1, 1))
    """
    fields: dict[str, object] = {}
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for part in line.split(";"):
            if not part.strip():
                continue
            m = _ASSIGN_RE.match(part)
            if m is None:
                raise SpecError(f"expected 'key = value', got {part.strip()!r}", lineno)
            key, value = m.group(1).lower(), m.group(2)
            if key in fields:
                raise SpecError(f"duplicate assignment to {key!r}", lineno)
            if key == "order":
                try:
                    fields[key] = int(value)
                except ValueError:
                    raise SpecError(f"order must be an integer, got {value!r}", lineno) from None
            elif key in ("p", "q", "initial"):
                fields[key] = _parse_list(value, lineno)
            else:
                raise SpecError(f"unknown key {key!r}", lineno)
            where[key] = lineno

    missing = [k for k in ("order", "p", "q", "initial") if k not in fields]
    if missing:
        raise SpecError(f"missing assignment(s): {', '.join(missing)}", len(text.splitlines()) or 1)
    order = fields["order"]
    if not 1 <= order <= MAX_ORDER:
        raise SpecError(f"order must lie in [1, {MAX_ORDER}], got {order}", where["order"])
    for key in ("p", "q", "initial"):
        if len(fields[key]) != order:
            raise SpecError(
                f"{key} has {len(fields[key])} entries but order is {order}", where[key]
            )
    return RecurrenceSpec(order, fields["p"], fields["q"], fields["initial"])


def _parse_list(value: str, lineno: int) -> tuple[Fraction, ...]:
    value = value.strip()
    if not (value.startswith("[") and value.endswith("]")):
        raise SpecError(f"expected a bracketed list, got {value!r}", lineno)
    body = value[1:-1].strip()
    if not body:
        return ()
    return tuple(_parse_rational(tok.strip(), lineno) for tok in body.split(","))


def format_spec(spec: RecurrenceSpec) -> str:
    """Inverse of :func:`parse_spec` (single line, canonical rationals)."""
    def lst(xs):
        return "[" + ", ".join(str(x) for x in xs) + "]"

    return f"order = {spec.order}; p = {lst(spec.p)}; q = {lst(spec.q)}; initial = {lst(spec.initial)}"


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows*cols")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "Matrix":
        rows = [[as_rational(x) for x in r] for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, d: int) -> "Matrix":
        return cls(d, d, tuple(Fraction(int(i == j)) for i in range(d) for j in range(d)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row_list(self) -> list[list[Fraction]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return Matrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def scale(self, c) -> "Matrix":
        c = as_rational(c)
        return Matrix(self.rows, self.cols, tuple(c * x for x in self.entries))

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            a, b = self.row_list(), other.row_list()
            return Matrix.from_rows(
                [[sum((a[i][k] * b[k][j] for k in range(self.cols)), Fraction(0))
                  for j in range(other.cols)] for i in range(self.rows)]
            )
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        return tuple(
            sum((self[i, k] * vec[k] for k in range(self.cols)), Fraction(0))
            for i in range(self.rows)
        )


@dataclass(frozen=True)
class SequenceWindow:
    """A contiguous run of terms; ``terms[j]`` is the term with index ``start + j``.

    ``exact`` is False for windows sampled from a real function: the terms
    are still Fractions, but only as accurate as the sampling precision.
    """

    start: int
    terms: tuple
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a window needs at least one term")

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def stop(self) -> int:
        """One past the last stored index."""
        return self.start + len(self.terms)

    def indices(self) -> range:
        return range(self.start, self.stop)

    def __contains__(self, n: int) -> bool:
        return self.start <= n < self.stop

    def __getitem__(self, n: int):
        if n not in self:
            raise IndexError(f"index {n} outside window [{self.start}, {self.stop - 1}]")
        return self.terms[n - self.start]

    def items(self):
        return zip(self.indices(), self.terms)


def companion_pair(spec: RecurrenceSpec) -> tuple[Matrix, Matrix]:
    """``(A, B)`` with ``(n*A + B) @ v_n == v_{n+1}``.

    All ``p[k]`` sit in the first row of ``A`` and ``A`` is zero elsewhere;
    ``B`` carries the ``q[k]`` in its first row and the unit subdiagonal.
    """
    d = spec.order
    zero, one = Fraction(0), Fraction(1)
    a_rows = [list(spec.p)] + [[zero] * d for _ in range(d - 1)]
    b_rows = [list(spec.q)] + [[one if j == i - 1 else zero for j in range(d)] for i in range(1, d)]
    return Matrix.from_rows(a_rows), Matrix.from_rows(b_rows)


def companion_at(spec: RecurrenceSpec, n: int) -> Matrix:
    if n < 0:
        raise ValueError("n must be >= 0")
    A, B = companion_pair(spec)
    return A.scale(n) + B


def generate(spec: RecurrenceSpec, up_to: int) -> SequenceWindow:
    """Terms ``a[0..up_to]`` computed exactly."""
    d = spec.order
    if up_to < d - 1:
        raise ValueError(f"up_to must be >= order-1 = {d - 1}")
    if up_to > MAX_TERMS:
        raise ValueError(f"refusing to generate more than {MAX_TERMS} terms")
    a = list(spec.initial)
    for n in range(d - 1, up_to):
        a.append(sum((spec.coefficient(k, n) * a[n - k] for k in range(d)), Fraction(0)))
    return SequenceWindow(0, tuple(a))


def state_vector(window: SequenceWindow, n: int, d: int) -> tuple:
    """``(a[n], a[n-1], ..., a[n-d+1])``."""
    if n - d + 1 not in window or n not in window:
        raise IndexError(f"state vector at n={n} (order {d}) is not inside the window")
    return tuple(window[n - j] for j in range(d))


def matrix_product_prefix(spec: RecurrenceSpec, n: int) -> Matrix:
    """``M_{d-2+n} ... M_{d}M_{d-1}``: maps ``v_{d-1}`` to ``v_{d-1+n}``.

    Products are anchored at the first complete state vector ``v_{d-1}``;
    for ``n == 0`` this is the identity.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    d = spec.order
    A, B = companion_pair(spec)
    prod = Matrix.identity(d)
    for j in range(n):
        prod = (A.scale(d - 1 + j) + B) @ prod
    return prod
