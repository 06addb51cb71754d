import json
import random
from fractions import Fraction

import pytest

from logconcave.core import RecurrenceSpec
from logconcave.criteria import Status
from logconcave.report import (analyze, decimal_approx, oracle_to_jsonable, report_to_json,
                               report_to_text, to_jsonable)

LINEAR = RecurrenceSpec.of((0, -1), (2, -1), (2, 3))
TIGHT = RecurrenceSpec.of((0, 0), (3, -2), (1, 4))
FAILING = RecurrenceSpec.of((1, -1), (0, 0), (1, 2))


def by_name(report, fragment):
    (v,) = [v for v in report.criteria if fragment in v.criterion]
    return v


class TestExamples:
    def test_linear_example(self):
        rep = analyze(LINEAR)
        assert rep.overall["status"] is Status.PROVED
        assert rep.overall["statement"] == "log-concave"
        qf = by_name(rep, "quadratic-form")
        assert qf.certificate["psd_for_all_n_from"] == 1
        assert qf.certificate["all_initial_data"]
        assert by_name(rep, "closed-form").proved
        # the oracle refutes the stronger property at level 2
        inf = rep.properties["infinitely-log-concave"]
        assert inf["status"] is Status.REFUTED
        assert inf["witness"] == {"level": 2, "index": 3, "value": -1390}
        assert by_name(rep, "dominant-root").status is Status.INCONCLUSIVE
        assert rep.errata == ()

    def test_tight_example(self):
        rep = analyze(TIGHT)
        assert rep.overall == {"status": Status.PROVED, "statement": "infinitely-log-concave",
                               "by": "constant-coefficient order-two tight criterion"}
        assert rep.errata == ()

    def test_failing_example(self):
        rep = analyze(FAILING)
        assert rep.overall["status"] is Status.REFUTED
        assert rep.overall["witness"] == {"level": 1, "index": 5, "value": -71}
        assert len(rep.errata) == 1

    def test_order_one(self):
        rep = analyze(RecurrenceSpec.of((0,), (1,), (1,)))
        assert rep.overall["status"] is Status.INCONCLUSIVE
        names = {v.criterion for v in rep.criteria}
        assert "quadratic-form PSD criterion" not in names


def test_r_factor_not_trusted_for_sign_changes():
    # a[n+1] = a[n] - a[n-1] has b[n] = 1, yet the r-form tail alone is no proof
    rep = analyze(RecurrenceSpec.of((0, 0), (1, -1), (1, 1)))
    v = by_name(rep, "r-factor")
    assert v.status is Status.INCONCLUSIVE
    assert v.certificate["coefficients_nonnegative_from"] is None


def test_parallel_matches_sequential():
    assert report_to_json(analyze(LINEAR, parallel=True)) == report_to_json(analyze(LINEAR))


def test_aggregation_is_sound_on_random_specs():
    rng = random.Random(11)
    for _ in range(40):
        d = rng.randint(1, 3)
        spec = RecurrenceSpec.of([rng.randint(-2, 2) for _ in range(d)],
                                 [rng.randint(-3, 3) for _ in range(d)],
                                 [rng.randint(-3, 5) for _ in range(d)])
        rep = analyze(spec, depth=3, horizon=30)
        witness = rep.oracle.first_witness()
        o = rep.overall
        if o["status"] is Status.PROVED:
            if o["statement"] == "infinitely-log-concave":
                assert witness is None
            else:
                assert rep.oracle.levels[1].first_negative is None
        if witness is not None:
            assert o["status"] is not Status.INCONCLUSIVE


class TestSerialisation:
    def test_json_shape(self):
        doc = json.loads(report_to_json(analyze(FAILING)))
        assert list(doc) == ["spec", "criteria", "oracle", "overall", "errata"]
        assert doc["spec"] == {"order": 2, "p": ["1", "-1"], "q": ["0", "0"], "initial": ["1", "2"]}
        (err,) = doc["errata"]
        assert err["paper_stated"] == "b_4 < 0" and err["computed_exact"] == "25"

    def test_floats_marked_approximate(self):
        assert to_jsonable(1.5) == {"value": 1.5, "approx": True}
        assert to_jsonable(Fraction(-3, 4)) == "-3/4"
        with pytest.raises(TypeError):
            to_jsonable(object())

    def test_text(self):
        text = report_to_text(analyze(FAILING))
        assert "overall: Refuted (log-concave)" in text
        assert "paper-stated 'b_4 < 0'" in text and "computed-exact" in text

    def test_oracle_dump(self):
        rep = analyze(TIGHT, depth=2, horizon=10)
        dump = oracle_to_jsonable(rep.oracle)
        assert dump["levels"][2]["terms"] == ["0"] * 7

    def test_decimal(self):
        assert decimal_approx(Fraction(1, 3)) == "0.33333333333333333333"
        assert decimal_approx(Fraction(46)) == "46"
