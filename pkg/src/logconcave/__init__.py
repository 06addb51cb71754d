"""Exact log-concavity analysis for recurrences with coefficients linear in n."""

from .core import RecurrenceSpec, SequenceWindow, SpecError, format_spec, generate, parse_spec
from .criteria import (ConstantSecondOrder, Status, Verdict, classify_const, classify_fixed,
                       classify_prec, cone_membership, dominant_root_profile)
from .ell import apply_L, iterate_L, oracle_inf_lc
from .qform import build_qform, lambda_min_bound, psd_exact, psd_tail, threshold_N
from .report import AnalysisReport, analyze, report_to_json, report_to_text

__all__ = [
    "AnalysisReport",
    "ConstantSecondOrder",
    "RecurrenceSpec",
    "SequenceWindow",
    "SpecError",
    "Status",
    "Verdict",
    "analyze",
    "apply_L",
    "build_qform",
    "classify_const",
    "classify_fixed",
    "classify_prec",
    "cone_membership",
    "dominant_root_profile",
    "format_spec",
    "generate",
    "iterate_L",
    "lambda_min_bound",
    "oracle_inf_lc",
    "parse_spec",
    "psd_exact",
    "psd_tail",
    "report_to_json",
    "report_to_text",
    "threshold_N",
]
