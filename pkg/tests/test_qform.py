import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_terms
from logconcave import _poly
from logconcave.core import RecurrenceSpec, generate, state_vector
from logconcave.qform import (QFormPair, SymmetricMatrix, build_qform, build_R, char_poly_matrix,
                              d2_psd_condition, determinant, lambda_min_bound, psd_exact, psd_tail,
                              q_at, quadratic_value, threshold_from_bounds, threshold_N)

small = st.integers(-6, 6)


@st.composite
def symmetric(draw, dim=None):
    d = dim or draw(st.integers(1, 4))
    rows = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            rows[i][j] = rows[j][i] = draw(small)
    return SymmetricMatrix.from_rows(rows)


class TestSymmetricMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            SymmetricMatrix.from_rows([[1, 2], [3, 4]])

    def test_form(self):
        S = SymmetricMatrix.from_rows([[1, 2], [2, 3]])
        assert S.form((1, -1)) == 1 - 4 + 3
        assert S.submatrix((1,)) == [[3]]


class TestBuild:
    def test_linear_example(self):
        pair = build_qform(RecurrenceSpec.of((0, -1), (2, -1), (2, 3)))
        assert pair.q0.rows() == [[1, -1], [-1, 1]]
        assert pair.q1.rows() == [[0, 0], [0, 1]]

    def test_failing_example(self):
        pair = build_qform(RecurrenceSpec.of((1, -1), (0, 0), (1, 2)))
        assert pair.q1.rows() == [[0, Fraction(-1, 2)], [Fraction(-1, 2), 1]]

    def test_order_one_rejected(self):
        with pytest.raises(ValueError):
            build_qform(RecurrenceSpec.of((1,), (0,), (1,)))

    def test_r_scaling(self):
        spec = RecurrenceSpec.of((0, 0), (1, -1), (1, 1))
        assert build_qform(spec, 4).q0.rows() == [[1, -2], [-2, 4]]

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 4), st.data())
    def test_identity(self, d, data):
        vals = st.fractions(-3, 3, max_denominator=3)
        p = data.draw(st.lists(vals, min_size=d, max_size=d))
        q = data.draw(st.lists(vals, min_size=d, max_size=d))
        init = data.draw(st.lists(vals, min_size=d, max_size=d))
        spec = RecurrenceSpec.of(p, q, init)
        terms = naive_terms(p, q, init, d + 12)
        window = generate(spec, d + 12)
        pair = build_qform(spec)
        for n in range(d - 1, d + 11):
            b = terms[n] ** 2 - terms[n + 1] * terms[n - 1]
            assert quadratic_value(pair, state_vector(window, n, d), n) == b
            if n - d + 1 <= 8:
                assert build_R(spec, n - d + 1, pair).form(tuple(reversed(init))) == b


class TestPSD:
    def test_determinant(self):
        assert determinant([[2, 1], [1, 2]]) == 3
        assert determinant([[0, 1], [1, 0]]) == -1
        assert determinant([[Fraction(1, 2), 0, 0], [0, 2, 0], [0, 0, 3]]) == 3
        assert determinant([[1, 2], [2, 4]]) == 0

    def test_zero_pivot_needs_other_minors(self):
        # leading minors are all zero; only the full set of minors sees -1
        S = SymmetricMatrix.from_rows([[0, 0], [0, -1]])
        res = psd_exact(S)
        assert not res and res.violated_minor == (1,) and res.violated_value == -1
        assert psd_exact(SymmetricMatrix.from_rows([[0, 0], [0, 0]]))

    def test_counts_minors(self):
        assert psd_exact(SymmetricMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])).minors_checked == 7

    @settings(max_examples=150, deadline=None)
    @given(symmetric(), st.lists(st.lists(small, min_size=4, max_size=4), min_size=8, max_size=8))
    def test_sound_against_sampled_forms(self, S, vectors):
        res = psd_exact(S)
        values = [S.form(v[:S.dim]) for v in vectors]
        if res:
            assert all(x >= 0 for x in values)
        if any(x < 0 for x in values):
            assert not res

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
    def test_gram_matrices_are_psd(self, B):
        rows = [[sum(B[k][i] * B[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        assert psd_exact(SymmetricMatrix.from_rows(rows))

    def test_d2_condition_matches_minors(self):
        rng = random.Random(3)
        for _ in range(200):
            spec = RecurrenceSpec.of([rng.randint(-3, 3) for _ in range(2)],
                                     [rng.randint(-3, 3) for _ in range(2)], (1, 1))
            pair = build_qform(spec)
            for n in range(0, 6):
                assert d2_psd_condition(spec, n) == bool(psd_exact(q_at(pair, n)))


class TestEigen:
    def test_char_poly(self):
        S = SymmetricMatrix.from_rows([[2, 1], [1, 2]])
        assert char_poly_matrix(S) == [1, -4, 3]

    @settings(max_examples=60, deadline=None)
    @given(symmetric(dim=2))
    def test_bracket_2x2(self, S):
        a, b, c = (float(x) for x in (S[0, 0], S[0, 1], S[1, 1]))
        exact = (a + c) / 2 - math.hypot((a - c) / 2, b)
        bound = lambda_min_bound(S)
        assert bound.width <= Fraction(1, 2**40)
        assert float(bound.lower) - 1e-9 <= exact <= float(bound.upper) + 1e-9

    def test_diagonal(self):
        S = SymmetricMatrix.from_rows([[5, 0, 0], [0, -2, 0], [0, 0, 1]])
        bound = lambda_min_bound(S, tol=Fraction(1, 1000))
        assert bound.lower <= -2 <= bound.upper

    def test_zero_matrix(self):
        assert lambda_min_bound(SymmetricMatrix.from_rows([[0, 0], [0, 0]])).lower == 0

    def test_threshold_formula(self):
        assert threshold_from_bounds(Fraction(-5), Fraction(2)) == 4
        assert threshold_from_bounds(Fraction(1), Fraction(2)) == 1
        assert threshold_from_bounds(Fraction(-5), Fraction(0)) is None

    def test_threshold_needs_positive_q1(self):
        spec = RecurrenceSpec.of((0, -1), (2, -1), (2, 3))
        assert threshold_N(build_qform(spec)) is None
        pair = QFormPair(SymmetricMatrix.from_rows([[-3, 0], [0, -1]]),
                         SymmetricMatrix.from_rows([[1, 0], [0, 1]]))
        N = threshold_N(pair)
        assert N is not None and all(psd_exact(q_at(pair, n)) for n in range(N, N + 50))


class TestTail:
    def test_linear_example_from_zero(self):
        tail = psd_tail(build_qform(RecurrenceSpec.of((0, -1), (2, -1), (2, 3))))
        assert tail is not None and tail.start == 0

    def test_failing_example_has_no_tail(self):
        assert psd_tail(build_qform(RecurrenceSpec.of((1, -1), (0, 0), (1, 2)))) is None

    def test_late_start(self):
        pair = QFormPair(SymmetricMatrix.from_rows([[-7, 0], [0, 1]]),
                         SymmetricMatrix.from_rows([[1, 0], [0, 0]]))
        assert psd_tail(pair).start == 7
        assert psd_tail(pair, floor_at=10).start == 10

    @settings(max_examples=80, deadline=None)
    @given(st.integers(2, 3), st.data())
    def test_tail_is_tight(self, d, data):
        pair = QFormPair(data.draw(symmetric(dim=d)), data.draw(symmetric(dim=d)))
        tail = psd_tail(pair)
        if tail is None:
            # some minor's leading coefficient is negative: fails eventually
            assert any(not psd_exact(q_at(pair, n)) for n in (10**6, 10**9))
            return
        N = tail.start
        assert all(psd_exact(q_at(pair, n)) for n in range(N, N + 40))
        if N > 0:
            assert not psd_exact(q_at(pair, N - 1))


class TestPoly:
    def test_roots_of_product(self):
        coeffs = [1, 0, -7, 6]  # (x-1)(x-2)(x+3)
        roots = _poly.real_root_intervals(coeffs, Fraction(1, 100))
        assert len(roots) == 3
        for (lo, hi), r in zip(roots, (2, 1, -3)):
            assert lo <= r <= hi

    def test_irrational_roots(self):
        roots = _poly.real_root_intervals([1, 0, -2], Fraction(1, 10**6))
        assert [lo < math.sqrt(2) <= hi for lo, hi in roots[:1]] == [True]
        assert roots[1][0] < -math.sqrt(2) <= roots[1][1]

    def test_no_real_roots(self):
        assert _poly.real_root_intervals([1, 0, 1], Fraction(1, 10)) == []
        assert _poly.real_root_intervals([3], Fraction(1, 10)) == []

    def test_repeated_root_counted_once(self):
        seq = _poly.sturm_sequence([1, -2, 1])
        assert _poly.count_roots(seq, 0, 2) == 1

    def test_evaluate_and_derivative(self):
        assert _poly.evaluate([1, -3, 2], 5) == 12
        assert _poly.derivative([1, -3, 2]) == [2, -3]
