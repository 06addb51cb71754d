"""Command-line front end: ``generate``, ``analyze``, ``oracle`` and ``cone``.

Exit status is 0 whenever an analysis completes, whatever the verdict;
1 for unreadable or malformed input; 2 for internal failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .core import SpecError, generate, parse_rational, parse_spec
from .criteria import ConstantSecondOrder, cone_membership
from .ell import DEFAULT_DEPTH, DEFAULT_HORIZON, oracle_inf_lc
from .report import analyze, decimal_approx, oracle_to_jsonable, report_to_json, report_to_text

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2


class InputError(Exception):
    """Bad user input that is not a spec parse error."""


class _Parser(argparse.ArgumentParser):
    # usage mistakes are input errors, not internal ones
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_spec(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read spec file {path!r}: {exc.strerror}") from exc
    return parse_spec(text)


def _rational_arg(token: str) -> Fraction:
    try:
        return parse_rational(token)
    except SpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def cmd_generate(args, out) -> int:
    spec = _load_spec(args.spec)
    if args.upto < spec.order - 1:
        raise InputError(f"--upto must be at least order-1 = {spec.order - 1}")
    window = generate(spec, args.upto)
    for n, x in window.items():
        out.write(f"{n}: {x}  ~{decimal_approx(x)}\n")
    return EXIT_OK


def cmd_analyze(args, out) -> int:
    spec = _load_spec(args.spec)
    report = analyze(spec, args.depth, args.horizon, parallel=args.parallel)
    text = report_to_json(report) if args.format == "json" else report_to_text(report)
    out.write(text + "\n")
    return EXIT_OK


def _oracle_text(oracle) -> str:
    lines = [f"oracle: depth {oracle.depth}, horizon {oracle.horizon}"]
    for lv in oracle.levels:
        status = "clean" if lv.first_negative is None else f"first negative at n={lv.first_negative}"
        lines.append(f"L^{lv.level} ({status}):")
        lines.extend(f"  {n}: {x}" for n, x in lv.window.items())
    return "\n".join(lines)


def cmd_oracle(args, out) -> int:
    spec = _load_spec(args.spec)
    oracle = oracle_inf_lc(spec, args.depth, args.horizon)
    if args.format == "json":
        out.write(json.dumps(oracle_to_jsonable(oracle), indent=2) + "\n")
    else:
        out.write(_oracle_text(oracle) + "\n")
    return EXIT_OK


def cone_grid(alpha, beta, lo, hi, step) -> list[tuple[Fraction, Fraction, bool, Fraction]]:
    """Rows ``(a, b, in_cone, S)`` over the square ``[lo, hi]**2``."""
    if step <= 0:
        raise InputError("--step must be positive")
    if hi < lo:
        raise InputError("--range needs lo <= hi")
    probe = ConstantSecondOrder(alpha, beta, 0, 0)
    if probe.beta >= 0:
        raise InputError("cone hypothesis violated: beta < 0 is required")
    if probe.discriminant <= 0:
        raise InputError("cone hypothesis violated: discriminant alpha^2 + 4*beta > 0 is required")
    axis = []
    x = Fraction(lo)
    while x <= hi:
        axis.append(x)
        x += step
    rows = []
    for a in axis:
        for b in axis:
            v = cone_membership(ConstantSecondOrder(alpha, beta, a, b))
            rows.append((a, b, v.certificate["in_cone"], v.certificate["S"]))
    return rows


def cmd_cone(args, out) -> int:
    rows = cone_grid(args.alpha, args.beta, args.range[0], args.range[1], args.step)
    lines = ["# a b in_cone S"]
    lines.extend(f"{a} {b} {int(flag)} {s}" for a, b, flag, s in rows)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="logconcave",
        description="Decide, certify or refute log-concavity of linear-coefficient recurrences.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, metavar="FILE", help="recurrence description file")

    oracle_opts = argparse.ArgumentParser(add_help=False)
    oracle_opts.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="iterations of L (default 4)")
    oracle_opts.add_argument("--horizon", type=int, default=DEFAULT_HORIZON, help="last index examined (default 64)")
    oracle_opts.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("generate", parents=[common], help="list exact terms")
    p.add_argument("--upto", type=int, default=10, help="last index to print (default 10)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", parents=[common, oracle_opts], help="run every criterion")
    p.add_argument("--parallel", action="store_true", help="run independent criteria concurrently")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", parents=[common, oracle_opts], help="dump the brute-force oracle")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("cone", help="initial-data cone grid for a[n+1] = alpha*a[n] + beta*a[n-1]")
    p.add_argument("--alpha", type=_rational_arg, required=True)
    p.add_argument("--beta", type=_rational_arg, required=True)
    p.add_argument("--range", type=_rational_arg, nargs=2, metavar=("LO", "HI"), default=(Fraction(-3), Fraction(3)))
    p.add_argument("--step", type=_rational_arg, default=Fraction(1))
    p.add_argument("--out", metavar="FILE", help="write the grid here instead of stdout")
    p.set_defaults(func=cmd_cone)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (SpecError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # bad numeric options (depth, horizon, upto) surface as ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
