"""Shared helpers: an independent naive oracle and acceptance reporting."""

import contextlib
import random
from fractions import Fraction

import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


def naive_terms(p, q, initial, up_to):
    """Terms a[0..up_to] by the literal recurrence, no package code."""
    p = [Fraction(x) for x in p]
    q = [Fraction(x) for x in q]
    a = [Fraction(x) for x in initial]
    d = len(a)
    for n in range(d - 1, up_to):
        a.append(sum((p[k] * n + q[k]) * a[n - k] for k in range(d)))
    return a[: up_to + 1]


def naive_L(seq, start=0):
    """(start+1, [s[k]^2 - s[k+1]s[k-1]]) for interior k."""
    return start + 1, [seq[k] ** 2 - seq[k + 1] * seq[k - 1] for k in range(1, len(seq) - 1)]


def naive_levels(terms, depth):
    levels = [(0, list(terms))]
    start, cur = 0, list(terms)
    for _ in range(depth):
        start, cur = naive_L(cur, start)
        levels.append((start, cur))
    return levels


def random_rational(rng, span=4, dens=(1, 1, 1, 2, 3)):
    return Fraction(rng.randint(-span, span), rng.choice(dens))


@pytest.fixture
def rng():
    return random.Random(20240611)


@contextlib.contextmanager
def acceptance(number, title):
    """Record a pass/fail line for acceptance criterion ``number``."""
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE_RESULTS[number] = (title, False, f"{type(exc).__name__}: {exc}"[:200])
        raise
    if number not in ACCEPTANCE_RESULTS:
        ACCEPTANCE_RESULTS[number] = (title, True, "")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok, why = ACCEPTANCE_RESULTS[number]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}"
        terminalreporter.write_line(line + (f"  ({why})" if why else ""))
