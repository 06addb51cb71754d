from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_terms
from logconcave.core import (Matrix, RecurrenceSpec, SequenceWindow, SpecError, as_rational,
                             companion_at, companion_pair, format_spec, generate,
                             matrix_product_prefix, parse_rational, parse_spec, state_vector)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def specs(draw, max_order=4):
    d = draw(st.integers(1, max_order))
    lists = st.lists(rationals, min_size=d, max_size=d)
    return RecurrenceSpec.of(draw(lists), draw(lists), draw(lists))


class TestRationals:
    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            as_rational(0.5)

    def test_strings(self):
        assert as_rational("-3/6") == Fraction(-1, 2)
        assert parse_rational("7") == 7

    @pytest.mark.parametrize("token", ["1/0", "1.5", "a", "1/-2", ""])
    def test_bad_tokens(self, token):
        with pytest.raises(SpecError):
            parse_rational(token)


class TestParse:
    def test_single_line(self):
        spec = parse_spec("order=2; p=[0,-1]; q=[2,-1]; initial=[2,3]")
        assert spec == RecurrenceSpec.of((0, -1), (2, -1), (2, 3))

    def test_comments_and_rationals(self):
        text = "# header\norder = 2  # two\np = [1/2, -3/4]\nq = [0, 0]; initial = [1, -1/3]\n"
        spec = parse_spec(text)
        assert spec.p == (Fraction(1, 2), Fraction(-3, 4))
        assert spec.initial[1] == Fraction(-1, 3)

    @pytest.mark.parametrize("text, line, fragment", [
        ("order = 2\np = [1, 2\n", 2, "bracketed"),
        ("order = 2\np=[1,2]\nq=[1,2]\ninitial=[1]\n", 4, "entries"),
        ("order = 2\norder = 3\n", 2, "duplicate"),
        ("order = 2\nfoo = 1\n", 2, "unknown"),
        ("order = 11\np=[]\nq=[]\ninitial=[]", 1, "order"),
        ("order = 2\np=[1,2]\n", 2, "missing"),
        ("order = 1\np=[1/0]\nq=[0]\ninitial=[1]", 2, "zero denominator"),
        ("order two\n", 1, "key = value"),
    ])
    def test_errors_name_the_line(self, text, line, fragment):
        with pytest.raises(SpecError) as info:
            parse_spec(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")
        assert fragment in str(info.value)

    @settings(max_examples=60, deadline=None)
    @given(specs())
    def test_format_round_trip(self, spec):
        assert parse_spec(format_spec(spec)) == spec

    def test_spec_validation(self):
        with pytest.raises(SpecError):
            RecurrenceSpec(0, (), (), ())
        with pytest.raises(SpecError):
            RecurrenceSpec.of((1,), (1, 2), (1,))


class TestMatrix:
    def test_products(self):
        m = Matrix.from_rows([[1, 2], [3, 4]])
        assert (m @ Matrix.identity(2)) == m
        assert (m @ (1, 1)) == (3, 7)
        assert m.T[0, 1] == 3
        assert (m + m.scale(-1)) == Matrix.zeros(2, 2)

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            Matrix.from_rows([[1, 2], [3]])
        with pytest.raises(ValueError):
            Matrix.identity(2) @ Matrix.identity(3)


class TestWindow:
    def test_indexing(self):
        w = SequenceWindow(3, (5, 6, 7))
        assert w[4] == 6 and 5 in w and 6 not in w
        assert list(w.indices()) == [3, 4, 5]
        with pytest.raises(IndexError):
            w[2]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            SequenceWindow(0, ())


class TestGenerate:
    def test_known_terms(self):
        spec = RecurrenceSpec.of((0, -1), (2, -1), (2, 3))
        assert generate(spec, 4).terms == (2, 3, 2, -5, -18)

    def test_initial_only(self):
        spec = RecurrenceSpec.of((0, 0, 0), (1, 1, 1), (1, 2, 3))
        assert generate(spec, 2).terms == (1, 2, 3)
        with pytest.raises(ValueError):
            generate(spec, 1)

    def test_refuses_huge_horizons(self):
        with pytest.raises(ValueError):
            generate(RecurrenceSpec.of((0,), (1,), (1,)), 10**6)

    @settings(max_examples=60, deadline=None)
    @given(specs(), st.integers(0, 25))
    def test_matches_naive_loop(self, spec, extra):
        up_to = spec.order - 1 + extra
        assert list(generate(spec, up_to).terms) == naive_terms(spec.p, spec.q, spec.initial, up_to)

    @settings(max_examples=40, deadline=None)
    @given(specs(), st.integers(0, 12))
    def test_companion_advances_state(self, spec, k):
        d = spec.order
        n = d - 1 + k
        window = generate(spec, n + 1)
        assert companion_at(spec, n) @ state_vector(window, n, d) == state_vector(window, n + 1, d)
        A, B = companion_pair(spec)
        assert companion_at(spec, n) == A.scale(n) + B

    @settings(max_examples=40, deadline=None)
    @given(specs(), st.integers(0, 10))
    def test_product_prefix(self, spec, n):
        d = spec.order
        window = generate(spec, d - 1 + n)
        v0 = tuple(reversed(spec.initial))
        assert matrix_product_prefix(spec, n) @ v0 == state_vector(window, d - 1 + n, d)
