"""``charpdiff`` command line.

Exit codes: 0 success, 1 domain error (the result does not exist or a map is
invalid), 2 usage or parse error.  Every failure prints exactly one line to
stderr of the form ``charpdiff: error[<Kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..coeffring import Chart
from ..diffop import VectorField, bernstein_degree, is_central, op_apply, op_commutator
from ..errors import CharpError, InvalidMap
from ..frobcenter import CentralElement, frob_center, iso_i, iso_i_inverse, restricted_power
from ..morita import (
    induced_symplectic_map,
    transport_center,
    validate_map,
)
from ..poisson import canonical_bracket, modp_bracket
from .expr import ParseError, evaluate, make_chart
from .mapfile import MapFormatError, load_map
from .render import render_matrix, render_polynomial, render_value, value_to_json

PROG = "charpdiff"
SCHEMA = "charpdiff-cli/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _chart_args(parser):
    parser.add_argument("--p", type=int, required=True, help="prime characteristic")
    parser.add_argument("--n", type=int, default=1, help="number of coordinates")
    parser.add_argument("--f", default="1", help="chart denominator (polynomial in x1..xn)")
    parser.add_argument("--e", type=int, choices=(1, 2), default=1,
                        help="coefficients mod p^e")


def _format_arg(parser):
    parser.add_argument("--format", choices=("text", "json"), default="text")


def _nonneg(text):
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 0:
        raise argparse.ArgumentTypeError("exponent must be nonnegative")
    return k


def build_parser():
    parser = _Parser(prog=PROG, description="Differential operators in characteristic p.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def chart_cmd(name, help_text, *positionals):
        p = sub.add_parser(name, help=help_text)
        for pos in positionals:
            p.add_argument(pos)
        _chart_args(p)
        _format_arg(p)
        return p

    norm = chart_cmd("normalize", "normal form of an expression", "expr")
    norm.add_argument("--mode", choices=("operator", "symbol"), default="operator")
    chart_cmd("mul", "product A*B", "a", "b")
    chart_cmd("comm", "commutator AB - BA", "a", "b")
    pw = chart_cmd("power", "power A^k", "a")
    pw.add_argument("k", type=_nonneg)
    chart_cmd("apply", "apply an operator to a function", "op", "function")
    chart_cmd("central", "test centrality (e = 1)", "op")
    chart_cmd("restricted-power", "p-th power derivation of a vector field", "field")
    chart_cmd("frob-center", "central element theta^p - theta^[p]", "field")
    chart_cmd("i", "center isomorphism on a symbol", "symbol")
    chart_cmd("inv-i", "inverse center isomorphism on an operator", "op")
    pb = chart_cmd("pbracket", "Poisson bracket", "a", "b")
    pb.add_argument("--kind", choices=("canonical", "modp"), required=True)
    chart_cmd("bernstein-deg", "Bernstein degree (affine chart)", "op")

    for name, help_text in (("validate-map", "check a map description"),
                            ("induced-map", "induced map of cotangent bundles")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        _format_arg(p)
    tr = sub.add_parser("transport", help="transport a central element along a map")
    tr.add_argument("file")
    tr.add_argument("--symbol", required=True, help="symbol on the source chart")
    _format_arg(tr)
    return parser


def _chart_json(chart: Chart):
    return {"p": chart.p, "e": chart.e, "n": chart.n, "f": render_polynomial(chart.f)}


def _emit(out, args, chart_info, text_lines, result):
    if args.format == "json":
        envelope = {"schema": SCHEMA, "command": args.command, "chart": chart_info,
                    "result": result}
        out.write(json.dumps(envelope, indent=2) + "\n")
    else:
        for line in text_lines:
            out.write(line + "\n")


def _value_result(value):
    return [render_value(value)], value_to_json(value)


def _run_chart_command(args, chart):
    cmd = args.command
    op = lambda text: evaluate(text, chart, "operator")  # noqa: E731
    sym = lambda text: evaluate(text, chart, "symbol")  # noqa: E731
    if cmd == "normalize":
        return _value_result(evaluate(args.expr, chart, args.mode))
    if cmd == "mul":
        return _value_result(op(args.a) * op(args.b))
    if cmd == "comm":
        return _value_result(op_commutator(op(args.a), op(args.b)))
    if cmd == "power":
        return _value_result(op(args.a) ** args.k)
    if cmd == "apply":
        P = op(args.op)
        h = evaluate(args.function, chart, "function")
        return _value_result(op_apply(P, h))
    if cmd == "central":
        flag = is_central(op(args.op))
        return ["true" if flag else "false"], {"kind": "boolean", "value": flag}
    if cmd in ("restricted-power", "frob-center"):
        theta = VectorField.from_operator(op(args.field))
        fn = restricted_power if cmd == "restricted-power" else frob_center
        return _value_result(fn(theta))
    if cmd == "i":
        return _value_result(iso_i(sym(args.symbol)))
    if cmd == "inv-i":
        return _value_result(iso_i_inverse(op(args.op)))
    if cmd == "pbracket":
        if args.kind == "canonical":
            return _value_result(canonical_bracket(sym(args.a), sym(args.b)))
        z = CentralElement(op(args.a))
        w = CentralElement(op(args.b))
        return _value_result(modp_bracket(z, w))
    if cmd == "bernstein-deg":
        deg = bernstein_degree(op(args.op))
        return [str(deg)], {"kind": "integer", "value": deg}
    raise UsageError(f"unknown command {cmd}")


def _map_chart_info(phi):
    return {"source": _chart_json(phi.source), "target": _chart_json(phi.target),
            "size": phi.size}


def _run_map_command(args, out):
    phi = load_map(args.file)
    info = _map_chart_info(phi)
    report = validate_map(phi)
    if args.command == "validate-map":
        lines = []
        rels = []
        for r in report.relations:
            status = "ok" if r.ok else "residual " + render_matrix(r.residual)
            lines.append(f"{r.name}: {status}")
            rels.append({"name": r.name, "ok": r.ok, "residual": render_matrix(r.residual)})
        lines.append(f"valid: {'true' if report.valid else 'false'}")
        _emit(out, args, info, lines, {"kind": "validation", "valid": report.valid,
                                       "relations": rels})
        if not report.valid:
            names = ", ".join(r.name for r in report.failures())
            raise InvalidMap(f"relations violated: {names}")
        return
    if not report.valid:
        names = ", ".join(r.name for r in report.failures())
        raise InvalidMap(f"relations violated: {names}")
    if args.command == "transport":
        s = evaluate(args.symbol, phi.source, "symbol")
        c = transport_center(phi, iso_i(s))
        image = iso_i_inverse(c)
        lines = [f"center: {render_value(c)}", f"symbol: {render_value(image)}"]
        _emit(out, args, info, lines, {"kind": "transport", "center": value_to_json(c),
                                       "symbol": value_to_json(image)})
        return
    induced = induced_symplectic_map(phi)
    checks = induced.bracket_checks()
    preserved = all(exp == act for _, exp, act in checks)
    lines = [f"{name} -> {render_value(img)}" for name, img in induced.images.items()]
    lines.append(f"preserves-bracket: {'true' if preserved else 'false'}")
    result = {
        "kind": "induced-map",
        "images": {name: value_to_json(img) for name, img in induced.images.items()},
        "checks": [{"name": name, "ok": exp == act} for name, exp, act in checks],
        "preserves_bracket": preserved,
    }
    _emit(out, args, info, lines, result)
    if not preserved:
        raise CharpError("induced map does not preserve the canonical bracket")


def _fail(err, kind, message, code):
    message = " ".join(str(message).split())
    err.write(f"{PROG}: error[{kind}]: {message}\n")
    return code


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command in ("validate-map", "transport", "induced-map"):
            _run_map_command(args, out)
            return 0
        try:
            chart = make_chart(args.p, args.n, args.f, args.e)
        except ParseError:
            raise
        except ValueError as exc:
            raise UsageError(f"bad chart: {exc}") from None
        lines, result = _run_chart_command(args, chart)
        _emit(out, args, _chart_json(chart), lines, result)
        return 0
    except UsageError as exc:
        return _fail(err, "usage", exc, 2)
    except ParseError as exc:
        return _fail(err, "ParseError", exc, 2)
    except MapFormatError as exc:
        return _fail(err, "MapFormatError", exc, 2)
    except OSError as exc:
        return _fail(err, "usage", f"cannot read {exc.filename}: {exc.strerror}", 2)
    except CharpError as exc:
        return _fail(err, type(exc).__name__, exc, 1)
    except ValueError as exc:
        return _fail(err, "InputError", exc, 2)


if __name__ == "__main__":
    sys.exit(main())
