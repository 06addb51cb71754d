"""Run every applicable criterion on a recurrence and aggregate the verdicts."""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable

from . import criteria as cr
from .core import RecurrenceSpec, SequenceWindow, generate
from .criteria import INF_LOG_CONCAVE, LOG_CONCAVE, Status, Verdict
from .ell import (R_FACTOR_DEFAULT, OracleReport, exceeds_r0, oracle_inf_lc,
                  r_factor_check)
from .qform import (build_qform, d2_psd_condition, lambda_min_bound, psd_exact,
                    psd_tail, q_at, threshold_from_bounds)

__all__ = [
    "AnalysisReport",
    "analyze",
    "to_jsonable",
    "report_to_json",
    "report_to_text",
    "oracle_to_jsonable",
    "decimal_approx",
    "KNOWN_CLAIMS",
]


def decimal_approx(x: Fraction, digits: int = 20) -> str:
    """Display-only decimal with ``digits`` significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        return format(Decimal(x.numerator) / Decimal(x.denominator), f".{digits}g")


def to_jsonable(obj):
    """Exact rationals become ``"p/q"`` strings; floats are tagged approximate."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, float):
        return {"value": obj, "approx": True}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Verdict):
        return {
            "criterion": obj.criterion,
            "statement": obj.statement,
            "status": obj.status.value,
            "scope": obj.scope,
            "certificate": to_jsonable(obj.certificate),
            "notes": list(obj.notes),
        }
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _spec_json(spec: RecurrenceSpec) -> dict:
    return {"order": spec.order, "p": list(spec.p), "q": list(spec.q), "initial": list(spec.initial)}


# Claims attached to well-known worked examples, keyed by (p, q, initial).
# Each claim: (description, level, index, relation, value); relation is
# "==" (exact value) or "<0".
KNOWN_CLAIMS: dict[tuple, list[tuple]] = {
    ((0, -1), (2, -1), (2, 3)): [
        ("a_2 = 2", 0, 2, "==", 2),
        ("a_3 = -5", 0, 3, "==", -5),
        ("b_2 = 19", 1, 2, "==", 19),
    ],
    ((0, 0), (3, -2), (1, 4)): (
        [(f"a_{n} = 3*2^{n} - 2", 0, n, "==", 3 * 2**n - 2) for n in range(6)]
        + [(f"b_{n} = 6*2^{n - 1}", 1, n, "==", 6 * 2 ** (n - 1)) for n in range(1, 6)]
    ),
    ((1, -1), (0, 0), (1, 2)): [
        ("b_4 < 0", 1, 4, "<0", None),
    ],
}


def _claims_for(spec: RecurrenceSpec) -> list[tuple]:
    key = (tuple(spec.p), tuple(spec.q), tuple(spec.initial))
    return KNOWN_CLAIMS.get(key, [])


def _errata(spec: RecurrenceSpec, oracle: OracleReport) -> list[dict]:
    out = []
    for desc, level, index, rel, value in _claims_for(spec):
        if level > oracle.depth or index not in oracle.levels[level].window:
            continue
        computed = oracle.levels[level].window[index]
        ok = computed < 0 if rel == "<0" else computed == value
        if not ok:
            entry = {"claim": desc, "level": level, "index": index,
                     "paper_stated": desc, "computed_exact": computed}
            first = oracle.levels[level].first_negative
            if rel == "<0" and first is not None:
                entry["first_negative_computed"] = {"index": first, "value": oracle.levels[level].window[first]}
            out.append(entry)
    return out


@dataclass(frozen=True)
class AnalysisReport:
    spec: RecurrenceSpec
    depth: int
    horizon: int
    criteria: tuple[Verdict, ...]
    oracle: OracleReport
    properties: dict
    overall: dict
    errata: tuple[dict, ...]

    def to_json(self) -> str:
        return report_to_json(self)


def _level1_clean_below(oracle: OracleReport, stop: int) -> tuple[bool, int | None]:
    """Whether ``b[n] >= 0`` for ``1 <= n < stop``, and the first bad index."""
    b = oracle.levels[1].window
    for n in range(1, stop):
        if n not in b:
            return False, None
        if b[n] < 0:
            return False, n
    return True, None


def _tail_verdict(name: str, statement: str, tail_start: int | None, window_terms: SequenceWindow,
                  check_below: Callable[[int], tuple[bool, int | None]], cert: dict,
                  horizon: int, notes: tuple = ()) -> Verdict:
    if tail_start is None:
        return Verdict(name, Status.INCONCLUSIVE, statement,
                       {**cert, "reason": "no index beyond which the form is PSD"}, notes)
    ok, bad = check_below(tail_start)
    cert = {**cert, "psd_for_all_n_from": tail_start}
    if ok:
        cert["window_checked"] = [1, tail_start - 1] if tail_start > 1 else []
        return Verdict(name, Status.PROVED, statement, cert, notes)
    if bad is None:
        return Verdict(name, Status.INCONCLUSIVE, statement,
                       {**cert, "reason": f"PSD tail starts at {tail_start}, beyond horizon {horizon}"}, notes)
    return Verdict(name, Status.INCONCLUSIVE, statement,
                   {**cert, "reason": f"direct check fails at n = {bad} below the PSD tail"}, notes)


def _qform_pointwise(spec, oracle, horizon):
    name = "quadratic-form PSD criterion"
    d = spec.order
    if d < 2:
        return None
    pair = build_qform(spec)
    lvl1 = oracle.levels[1]
    if lvl1.first_negative is not None:
        n = lvl1.first_negative
        psd = psd_exact(q_at(pair, n)) if n >= d - 1 else None
        cert = {"witness": {"level": 1, "index": n, "value": lvl1.window[n]}}
        if psd is not None and not psd:
            cert["violated_minor"] = {"rows": list(psd.violated_minor), "value": psd.violated_value}
        return Verdict(name, Status.REFUTED, LOG_CONCAVE, cert)
    first_bad = None
    count = 0
    for n in range(d - 1, horizon + 1):
        res = psd_exact(q_at(pair, n))
        if res:
            count += 1
        elif first_bad is None:
            first_bad = {"n": n, "rows": list(res.violated_minor), "value": res.violated_value}
    cert = {"scan": [d - 1, horizon], "psd_count": count, "first_non_psd": first_bad}
    tail = psd_tail(pair, floor_at=d - 1)
    v = _tail_verdict(name, LOG_CONCAVE, tail.start if tail else None, lvl1.window,
                      lambda s: _level1_clean_below(oracle, s), cert, horizon)
    if v.proved and d == 2 and tail.start <= 1:
        v = Verdict(v.criterion, v.status, v.statement,
                    {**v.certificate, "all_initial_data": True}, v.notes)
    return v


def _threshold(spec, oracle, horizon):
    name = "eigenvalue threshold criterion"
    if spec.order < 2:
        return None
    pair = build_qform(spec)
    b0 = lambda_min_bound(pair.q0)
    b1 = lambda_min_bound(pair.q1)
    N = threshold_from_bounds(b0.lower, b1.lower)
    cert = {"lambda_min_Q0": [b0.lower, b0.upper], "lambda_min_Q1": [b1.lower, b1.upper], "N": N}
    if N is None:
        return Verdict(name, Status.INCONCLUSIVE, LOG_CONCAVE,
                       {**cert, "reason": "smallest eigenvalue of Q1 not certified positive"})
    return _tail_verdict(name, LOG_CONCAVE, max(N, spec.order - 1), oracle.levels[1].window,
                         lambda s: _level1_clean_below(oracle, s), cert, horizon)


def _d2_closed_form(spec, oracle, horizon):
    name = "order-two closed-form PSD condition"
    if spec.order != 2:
        return None
    flags = [d2_psd_condition(spec, n) for n in range(1, horizon + 1)]
    tail = psd_tail(build_qform(spec), floor_at=1)
    if tail is not None:
        # the closed form and the polynomial tail must agree wherever both apply
        assert all(flags[n - 1] for n in range(tail.start, horizon + 1))
    cert = {"scan": [1, horizon], "condition_holds": sum(flags),
            "first_failure": next((n for n, ok in enumerate(flags, 1) if not ok), None)}
    lvl1 = oracle.levels[1]
    if lvl1.first_negative is not None:
        return Verdict(name, Status.REFUTED, LOG_CONCAVE,
                       {**cert, "witness": {"level": 1, "index": lvl1.first_negative,
                                            "value": lvl1.value_at_first_negative}})
    return _tail_verdict(name, LOG_CONCAVE, tail.start if tail else None, lvl1.window,
                         lambda s: _level1_clean_below(oracle, s), cert, horizon)


def _constant(spec, oracle, horizon):
    cs = cr.ConstantSecondOrder.from_spec(spec)
    return None if cs is None else cr.classify_const(cs)


def _cone(spec, oracle, horizon):
    cs = cr.ConstantSecondOrder.from_spec(spec)
    return None if cs is None else cr.cone_membership(cs)


def _fixed(spec, oracle, horizon):
    return cr.classify_fixed(oracle.levels[0].window)


def _dominant(spec, oracle, horizon):
    if spec.order != 2:
        return None
    lvl1 = oracle.levels[1]
    if horizon < 15 and lvl1.first_negative is None:
        return Verdict("dominant-root order-two criterion", Status.INCONCLUSIVE, INF_LOG_CONCAVE,
                       {"reason": "horizon below 15 is too short for a Turan-ratio profile"})
    return cr.classify_prec(spec, horizon=horizon, depth=oracle.depth)


def _nonnegative_from(spec: RecurrenceSpec) -> int | None:
    """Smallest ``N >= d-1`` with every ``p[k]*n + q[k] >= 0`` for ``n >= N``."""
    N = spec.order - 1
    for pk, qk in zip(spec.p, spec.q):
        if pk < 0 or (pk == 0 and qk < 0):
            return None
        if pk > 0:
            N = max(N, math.ceil(-qk / pk))
    return N


def _r_factor(spec, oracle, horizon, r=R_FACTOR_DEFAULT):
    """r-factor log-concavity with ``r >= (3 + sqrt 5)/2`` forces infinite
    log-concavity of a nonnegative sequence.  Both halves need an all-n
    argument: nonnegative coefficients from some index on, and a PSD tail
    for ``a[n]**2 - r*a[n+1]*a[n-1]``."""
    name = "r-factor criterion"
    assert exceeds_r0(r)
    window = oracle.levels[0].window
    bad = r_factor_check(window, r)
    cert = {"r": r, "r_at_least_r0": True, "window_violation": bad}
    pos = _nonnegative_from(spec)
    cert["coefficients_nonnegative_from"] = pos
    if spec.order < 2:
        return Verdict(name, Status.INCONCLUSIVE, INF_LOG_CONCAVE,
                       {**cert, "reason": "needs order >= 2"})
    if pos is None or pos > horizon:
        return Verdict(name, Status.INCONCLUSIVE, INF_LOG_CONCAVE,
                       {**cert, "reason": "no nonnegativity argument for all n; window evidence only"})
    if any(x < 0 for x in window.terms[:pos + 1]):
        return Verdict(name, Status.INCONCLUSIVE, INF_LOG_CONCAVE,
                       {**cert, "reason": "sequence has negative terms"})
    tail = psd_tail(build_qform(spec, r), floor_at=spec.order - 1)

    def check_below(stop):
        if stop > window.stop - 1:
            return False, None
        sub = SequenceWindow(0, window.terms[:stop + 1])
        hit = r_factor_check(sub, r) if len(sub) >= 3 else None
        return hit is None, hit

    return _tail_verdict(name, INF_LOG_CONCAVE, tail.start if tail else None, window,
                         check_below, cert, horizon)


_CRITERIA = (_qform_pointwise, _threshold, _d2_closed_form, _constant, _cone,
             _fixed, _dominant, _r_factor)


def _aggregate(verdicts, oracle: OracleReport):
    lvl1 = oracle.levels[1]
    witness_any = oracle.first_witness()

    def prop(statement_ok, refute_level):
        if refute_level is not None:
            return {"status": Status.REFUTED,
                    "witness": {"level": refute_level.level, "index": refute_level.first_negative,
                                "value": refute_level.value_at_first_negative}}
        for v in verdicts:
            if v.proved and v.scope == "all-n" and v.statement in statement_ok:
                return {"status": Status.PROVED, "by": v.criterion}
        return {"status": Status.INCONCLUSIVE}

    lc = prop((LOG_CONCAVE, INF_LOG_CONCAVE), lvl1 if lvl1.first_negative is not None else None)
    inf = prop((INF_LOG_CONCAVE,), witness_any)

    # a criterion-level refutation must agree with the oracle
    for v in verdicts:
        if v.refuted and v.statement in (LOG_CONCAVE, INF_LOG_CONCAVE):
            w = v.certificate.get("witness")
            if w is not None and w["level"] <= oracle.depth:
                level = oracle.levels[w["level"]]
                if w["index"] in level.window and level.window[w["index"]] != w["value"]:
                    raise AssertionError(f"{v.criterion} witness disagrees with the oracle")
                if inf["status"] is not Status.REFUTED:
                    raise AssertionError(f"{v.criterion} refutes but the oracle window is clean")

    for name, p in ((LOG_CONCAVE, lc), (INF_LOG_CONCAVE, inf)):
        if p["status"] is Status.PROVED:
            bad = lvl1.first_negative if name == LOG_CONCAVE else witness_any
            if bad is not None:
                raise AssertionError(f"{name} proved while the oracle holds a negative witness")

    if inf["status"] is Status.PROVED:
        overall = {"status": Status.PROVED, "statement": INF_LOG_CONCAVE, "by": inf["by"]}
    elif lc["status"] is Status.REFUTED:
        overall = {"status": Status.REFUTED, "statement": LOG_CONCAVE, "witness": lc["witness"]}
    elif lc["status"] is Status.PROVED:
        overall = {"status": Status.PROVED, "statement": LOG_CONCAVE, "by": lc["by"]}
    elif inf["status"] is Status.REFUTED:
        overall = {"status": Status.REFUTED, "statement": INF_LOG_CONCAVE, "witness": inf["witness"]}
    else:
        overall = {"status": Status.INCONCLUSIVE, "statement": INF_LOG_CONCAVE}
    return {LOG_CONCAVE: lc, INF_LOG_CONCAVE: inf}, overall


def analyze(spec: RecurrenceSpec, depth: int = 4, horizon: int = 64,
            parallel: bool = False) -> AnalysisReport:
    """Oracle plus every applicable criterion; see :class:`AnalysisReport`."""
    oracle = oracle_inf_lc(spec, depth, horizon)
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda f: f(spec, oracle, horizon), _CRITERIA))
    else:
        results = [f(spec, oracle, horizon) for f in _CRITERIA]
    verdicts = tuple(v for v in results if v is not None)
    properties, overall = _aggregate(verdicts, oracle)
    return AnalysisReport(spec, depth, horizon, verdicts, oracle, properties, overall,
                          tuple(_errata(spec, oracle)))


def _oracle_summary(oracle: OracleReport) -> dict:
    return {
        "depth": oracle.depth,
        "horizon": oracle.horizon,
        "levels": [
            {"level": lv.level, "start": lv.window.start, "length": len(lv.window),
             "first_negative": lv.first_negative, "value": lv.value_at_first_negative}
            for lv in oracle.levels
        ],
    }


def oracle_to_jsonable(oracle: OracleReport) -> dict:
    """Full dump: every level's window."""
    out = _oracle_summary(oracle)
    for entry, lv in zip(out["levels"], oracle.levels):
        entry["terms"] = list(lv.window.terms)
    return to_jsonable(out)


def report_to_json(report: AnalysisReport) -> str:
    doc = {
        "spec": _spec_json(report.spec),
        "criteria": list(report.criteria),
        "oracle": _oracle_summary(report.oracle),
        "overall": {**report.overall, "properties": report.properties},
        "errata": list(report.errata),
    }
    return json.dumps(to_jsonable(doc), indent=2)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return f"~{x:.6g}"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, enum.Enum):
        return x.value
    return str(x)


def report_to_text(report: AnalysisReport) -> str:
    from .core import format_spec

    lines = [f"spec: {format_spec(report.spec)}",
             f"oracle: depth {report.depth}, horizon {report.horizon}"]
    for lv in report.oracle.levels[1:]:
        where = ("clean" if lv.first_negative is None
                 else f"first negative at n={lv.first_negative} ({lv.value_at_first_negative})")
        lines.append(f"  L^{lv.level}: indices {lv.window.start}..{lv.window.stop - 1}, {where}")
    lines.append("criteria:")
    for v in report.criteria:
        scope = "" if v.scope == "all-n" else f" [{v.scope}]"
        lines.append(f"  {v.status.value:<12} {v.statement:<24} {v.criterion}{scope}")
        for k, val in v.certificate.items():
            lines.append(f"      {k}: {_fmt(val)}")
        for note in v.notes:
            lines.append(f"      note: {note}")
    lines.append("properties:")
    for name, p in report.properties.items():
        extra = {k: v for k, v in p.items() if k != "status"}
        lines.append(f"  {name}: {p['status'].value} {_fmt(extra) if extra else ''}".rstrip())
    o = report.overall
    lines.append(f"overall: {o['status'].value} ({o['statement']})")
    for e in report.errata:
        lines.append(f"erratum: paper-stated {e['paper_stated']!r}; computed-exact value at "
                     f"level {e['level']}, n={e['index']}: {e['computed_exact']}")
        if "first_negative_computed" in e:
            f = e["first_negative_computed"]
            lines.append(f"         first negative value is at n={f['index']}: {f['value']}")
    return "\n".join(lines)
