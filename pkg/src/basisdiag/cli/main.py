"""The ``basisdiag`` command.

Exit codes: 0 success, 1 usage or input error, 2 not proved (or check
failed), 3 rewrite budget exhausted.  Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import diagram as dg
from .. import hilb, protocols
from .. import structures as st
from ..errors import BasisDiagError, BudgetExhausted
from ..rules import NotProved, certificates, normalize, prove_equal
from ..rules.normalize import DEFAULT_BUDGET, MODES
from . import interp_file, render
from .language import format_complex, parse, to_text

EXIT_OK, EXIT_USAGE, EXIT_NOT_PROVED, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class InputError(Exception):
    pass


def read_source(arg: str) -> tuple[str, str]:
    """Text and display name for a path, ``-`` (stdin) or inline diagram text."""
    if arg == "-":
        return sys.stdin.read(), "<stdin>"
    p = Path(arg)
    if p.is_file():
        return p.read_text(), arg
    if "(" in arg:
        return arg, "<inline>"
    raise InputError(f"{arg}: no such file")


def load_diagram(arg: str) -> dg.Diagram:
    text, name = read_source(arg)
    try:
        return parse(text)
    except BasisDiagError as e:
        raise InputError(f"{name}:{e}") from None


def load_interp(arg: str | None) -> hilb.Interpretation | None:
    if arg is None:
        return None
    text, name = read_source(arg)
    try:
        return interp_file.loads(text)
    except BasisDiagError as e:
        raise InputError(f"{name}:{e}") from None


def _num(x: float) -> float:
    return float(f"{x:.12g}") + 0.0


# ------------------------------------------------------------------ commands


def cmd_validate(args) -> int:
    text, name = read_source(args.file)
    try:
        f = parse(text)
    except BasisDiagError as e:
        print(f"{name}:{e}", file=sys.stderr)
        return EXIT_USAGE
    problems = dg.validate(f)
    if not dg.is_acyclic(f):
        problems.append(dg.Violation("cycle", "the port graph has a directed cycle"))
    for v in problems:
        print(f"{name}: {v}", file=sys.stderr)
    if problems:
        return EXIT_USAGE
    dom = ", ".join(map(str, f.dom)) or "I"
    cod = ", ".join(map(str, f.cod)) or "I"
    print(f"valid: {dom} -> {cod} ({len(f.nodes)} generators)")
    return EXIT_OK


def cmd_eval(args) -> int:
    f = load_diagram(args.file)
    interp = load_interp(args.interp)
    t = hilb.evaluate(f, interp)
    shape = list(t.shape)
    flat = t.reshape(-1)
    if args.json:
        out = {
            "cod": [str(w) for w in f.cod],
            "dom": [str(w) for w in f.dom],
            "entries": [{"im": _num(z.imag), "re": _num(z.real)} for z in flat],
            "shape": shape,
        }
        print(json.dumps(out, sort_keys=True, indent=2))
        return EXIT_OK
    print(f"shape: {shape}  (outputs then inputs)")
    if t.ndim == 0:
        print(format_complex(t.item()))
        return EXIT_OK
    rows = t.reshape(-1, shape[-1]) if shape else flat.reshape(1, -1)
    for row in rows:
        print("  ".join(format_complex(_num(z.real) + 1j * _num(z.imag)) for z in row))
    return EXIT_OK


def cmd_normalize(args) -> int:
    f = load_diagram(args.file)
    interp = load_interp(args.interp)
    tags = interp.tags if interp else {}
    try:
        nf, trace = normalize(f, args.rules, args.budget, tags)
    except BudgetExhausted as e:
        print(f"budget of {e.budget} rewrite steps exhausted", file=sys.stderr)
        if e.trace is not None:
            print(e.trace.text())
        return EXIT_BUDGET
    print(to_text(nf))
    if args.trace:
        print(f"# trace: {len(trace.steps)} steps")
        for line in trace.lines():
            print(line)
    return EXIT_OK


def cmd_prove_equal(args) -> int:
    f, g = load_diagram(args.f), load_diagram(args.g)
    interp = load_interp(args.interp)
    tags = interp.tags if interp else {}
    try:
        result = prove_equal(f, g, args.budget, args.rules, tags)
    except BudgetExhausted as e:
        print(f"budget of {e.budget} exhausted before a proof was found", file=sys.stderr)
        if e.trace is not None:
            print(e.trace.text())
        return EXIT_BUDGET
    if isinstance(result, NotProved):
        print("not proved: the normal forms differ", file=sys.stderr)
        print(f"# lhs normal form\n{to_text(result.lhs_normal_form)}")
        print(f"# rhs normal form\n{to_text(result.rhs_normal_form)}")
        return EXIT_NOT_PROVED
    n = len(result.steps)
    print(f"proved in {n} step{'s' if n != 1 else ''}")
    if result.steps:
        print(result.text())
    return EXIT_OK


def cmd_verify(args) -> int:
    report = protocols.verify_protocol(args.protocol, args.mode, args.rules)
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK if report.passed else EXIT_NOT_PROVED


def selfcheck_rows() -> list[tuple[str, str, float, bool]]:
    rows = []
    for name in ("Z", "X", "Y"):
        s = st.builtin(name)
        for law, r in st.check_basis(s).residuals.items():
            rows.append((f"structure {name}", law, r, r <= st.TOL))
        for law, r in st.info_flow_check(s).residuals.items():
            rows.append((f"structure {name}", f"info-flow-{law}", r, r <= st.TOL))
    for rule, r in certificates().items():
        rows.append(("rule", rule, r, r <= st.TOL))
    return rows


def cmd_selfcheck(args) -> int:
    rows = selfcheck_rows()
    w = max(len(law) for _, law, _, _ in rows)
    for group, law, r, ok in rows:
        print(f"{group:<12} {law:<{w}} {r:.3e} {'ok' if ok else 'FAIL'}")
    bad = sum(not ok for *_, ok in rows)
    print(f"{len(rows) - bad}/{len(rows)} checks within {st.TOL:g}")
    return EXIT_OK if not bad else EXIT_NOT_PROVED


def cmd_render(args) -> int:
    f = load_diagram(args.file)
    if args.format == "dot":
        sys.stdout.write(render.to_dot(f))
    else:
        sys.stdout.write(render.to_ascii(f))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="basisdiag", description="String diagrams for basis structures.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    src_help = "diagram file, '-' for stdin, or inline diagram text"

    s = sub.add_parser("validate", help="parse and check a diagram")
    s.add_argument("file", help=src_help)
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("eval", help="evaluate a diagram to a tensor")
    s.add_argument("file", help=src_help)
    s.add_argument("--interp", required=True, help="interpretation file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(run=cmd_eval)

    s = sub.add_parser("normalize", help="rewrite to normal form")
    s.add_argument("file", help=src_help)
    s.add_argument("--trace", action="store_true")
    s.add_argument("--rules", choices=MODES, default="all")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--interp", help="interpretation file supplying box tags")
    s.set_defaults(run=cmd_normalize)

    s = sub.add_parser("prove-equal", help="try to prove two diagrams equal")
    s.add_argument("f", help=src_help)
    s.add_argument("g", help=src_help)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--rules", choices=MODES, default="all")
    s.add_argument("--interp", help="interpretation file supplying box tags")
    s.set_defaults(run=cmd_prove_equal)

    s = sub.add_parser("verify", help="verify a protocol branch by branch")
    s.add_argument("protocol", choices=("teleport", "state-transfer"))
    s.add_argument("--mode", choices=("numeric", "diagrammatic", "both"), default="both")
    s.add_argument("--rules", choices=MODES, default="all")
    s.add_argument("--json", action="store_true")
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("selfcheck", help="run the law suite and rule certificates")
    s.set_defaults(run=cmd_selfcheck)

    s = sub.add_parser("render", help="render a diagram as DOT or text")
    s.add_argument("file", help=src_help)
    s.add_argument("--format", choices=("dot", "ascii"), default="dot")
    s.set_defaults(run=cmd_render)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "budget", 1) < 1:
        print("basisdiag: error: --budget must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.run(args)
    except InputError as e:
        print(f"basisdiag: {e}", file=sys.stderr)
    except (BasisDiagError, OSError, ValueError, KeyError) as e:
        print(f"basisdiag: {e}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
