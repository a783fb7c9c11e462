import io
import os
import random
import shlex
import subprocess
import sys
from pathlib import Path

import pytest

from charpdiff.cli import ParseError, evaluate, main, parse_expr, render_value
from charpdiff.cli.expr import BinOp, Neg, Pow, make_chart
from charpdiff.cli.mapfile import MapFormatError, parse_map_text
from charpdiff.coeffring import Chart
from charpdiff.diffop import DiffOperator
from charpdiff.frobcenter import SymbolPolynomial, iso_i

import randgen

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("CHARPDIFF_REGEN_GOLDEN") == "1"

# (name, argv); each name has a file golden/<name>.out
CASES = [
    ("normalize_weyl", ["normalize", "--p", "3", "d1*x1"]),
    ("normalize_symbol", ["normalize", "--p", "3", "--mode", "symbol", "(x1+y1)^3"]),
    ("normalize_localized", ["normalize", "--p", "3", "--n", "2", "--f", "x1*x2+1", "d1*finv"]),
    ("mul_d2x2", ["mul", "--p", "3", "d1^2", "x1^2"]),
    ("comm_weyl", ["comm", "--p", "5", "d1", "x1"]),
    ("comm_mod_p2", ["comm", "--p", "3", "--e", "2", "d1^3", "x1"]),
    ("power_euler", ["power", "--p", "3", "x1*d1", "3"]),
    ("apply_euler", ["apply", "--p", "5", "x1*d1", "x1^4 + 2*x1"]),
    ("apply_localized", ["apply", "--p", "5", "--f", "x1", "d1", "finv"]),
    ("central_true", ["central", "--p", "3", "x1^3 + d1^3"]),
    ("central_false", ["central", "--p", "3", "x1*d1"]),
    ("restricted_power", ["restricted-power", "--p", "5", "x1*d1"]),
    ("frob_center", ["frob-center", "--p", "3", "x1*d1"]),
    ("iso_i", ["i", "--p", "3", "--f", "x1", "x1*y1 + finv"]),
    ("inv_i", ["inv-i", "--p", "3", "x1^3*d1^3"]),
    ("pbracket_canonical", ["pbracket", "--p", "5", "--kind", "canonical", "y1^2", "x1"]),
    ("pbracket_modp", ["pbracket", "--p", "3", "--kind", "modp", "d1^3", "x1^3"]),
    ("bernstein_deg", ["bernstein-deg", "--p", "3", "x1^2*d1^3"]),
    ("json_mul", ["mul", "--p", "3", "--format", "json", "d1", "x1"]),
    ("json_central", ["central", "--p", "3", "--format", "json", "d1^3"]),
    ("json_symbol", ["i", "--p", "3", "--format", "json", "--f", "x1", "finv*y1"]),
    ("validate_identity", ["validate-map", "maps/identity.map"]),
    ("validate_shear_json", ["validate-map", "--format", "json", "maps/shear.map"]),
    ("validate_localized", ["validate-map", "maps/localized.map"]),
    ("induced_shear", ["induced-map", "maps/shear.map"]),
    ("induced_localized", ["induced-map", "maps/localized.map"]),
    ("induced_diagonal_json", ["induced-map", "--format", "json", "maps/diagonal2.map"]),
    ("transport_translation", ["transport", "maps/translation.map", "--symbol", "x1*y1"]),
    # error paths
    ("err_no_command", []),
    ("err_missing_p", ["normalize", "x1"]),
    ("err_unknown_command", ["frobnicate", "--p", "3"]),
    ("err_negative_power", ["power", "--p", "3", "d1", "-1"]),
    ("err_bad_e", ["normalize", "--p", "3", "--e", "3", "x1"]),
    ("err_not_prime", ["normalize", "--p", "4", "x1"]),
    ("err_bad_chart", ["normalize", "--p", "3", "--f", "3", "x1"]),
    ("err_parse_char", ["normalize", "--p", "3", "x1 $ d1"]),
    ("err_parse_eof", ["mul", "--p", "3", "x1 +", "d1"]),
    ("err_parse_mode", ["mul", "--p", "3", "x1", "y1"]),
    ("err_parse_index", ["normalize", "--p", "3", "--n", "1", "x2"]),
    ("err_parse_finv", ["central", "--p", "3", "finv"]),
    ("err_not_vector_field", ["frob-center", "--p", "3", "x1*d1^2"]),
    ("err_not_in_image", ["inv-i", "--p", "3", "x1*d1"]),
    ("err_prime_field", ["restricted-power", "--p", "3", "--e", "2", "d1"]),
    ("err_not_central", ["pbracket", "--p", "3", "--kind", "modp", "x1", "d1"]),
    ("err_bernstein", ["bernstein-deg", "--p", "3", "--f", "x1", "finv"]),
    ("err_invalid_map", ["validate-map", "maps/invalid.map"]),
    ("err_induced_invalid", ["induced-map", "maps/invalid.map"]),
    ("err_not_scalar", ["transport", "maps/nonscalar.map", "--symbol", "x1"]),
    ("err_map_format", ["validate-map", "maps/badformat.map"]),
    ("err_map_missing", ["validate-map", "maps/missing.map"]),
    ("err_map_expr", ["validate-map", "maps/badexpr.map"]),
    ("err_map_file", ["induced-map", "maps/nope.map"]),
]


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    head = f"$ {shlex.join(['charpdiff', *argv])}\nexit: {code}\n"
    return f"{head}--- stdout\n{out.getvalue()}--- stderr\n{err.getvalue()}"


@pytest.mark.parametrize("name,argv", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, monkeypatch):
    monkeypatch.chdir(GOLDEN)
    first = run_cli(argv)
    assert run_cli(argv) == first
    path = GOLDEN / f"{name}.out"
    if REGEN:
        path.write_text(first, encoding="utf-8")
    assert path.read_text(encoding="utf-8") == first


def test_error_lines_are_single():
    for name, argv in CASES:
        if name.startswith("err_"):
            text = (GOLDEN / f"{name}.out").read_text(encoding="utf-8")
            err = text.split("--- stderr\n", 1)[1]
            assert err.count("\n") == 1 and err.startswith("charpdiff: error[")
            assert "exit: 0" not in text


class TestParser:
    def test_precedence(self):
        ast = parse_expr("-x1*d1^2 + 3")
        assert isinstance(ast, BinOp) and ast.op == "+"
        assert isinstance(ast.left, Neg)
        prod = ast.left.operand
        assert prod.op == "*" and isinstance(prod.right, Pow) and prod.right.exponent == 2

    def test_left_to_right_products(self):
        c = Chart.affine(3, 1)
        assert evaluate("d1*x1", c) == evaluate("x1*d1 + 1", c)
        assert evaluate("x1*d1", c) != evaluate("d1*x1", c)

    def test_positions(self):
        with pytest.raises(ParseError) as info:
            parse_expr("x1 +\n  * d1")
        assert (info.value.line, info.value.column) == (2, 3)

    @pytest.mark.parametrize("text", ["", "x0", "x1^", "x1^d1", "(x1", "x1)", "z3", "x1 x2", "2.5"])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_expr(text)

    def test_modes(self):
        with pytest.raises(ParseError):
            parse_expr("y1", "operator")
        with pytest.raises(ParseError):
            parse_expr("d1", "symbol")
        with pytest.raises(ParseError):
            parse_expr("y1", "function")
        parse_expr("x1*finv", "function")

    def test_render_examples(self):
        c = make_chart(5, 2, "x1")
        assert render_value(evaluate("0*x1", c)) == "0"
        assert render_value(evaluate("3*x2^2*finv*d1*d2 - 1", c)) == "3*x2^2*finv*d1*d2 + 4"
        assert render_value(evaluate("y2^2 + x1*y1", c, "symbol")) == "y2^2 + x1*y1"
        a3 = Chart.affine(3, 1)
        assert render_value(iso_i(SymbolPolynomial.y(a3, 1))) == "d1^3"
        assert render_value(evaluate("d1*x1", a3)) == "x1*d1 + 1"

    def test_finv_cancels_f(self):
        c = make_chart(5, 2, "x1*x2 + 1")
        assert evaluate("finv*(x1*x2 + 1)", c) == DiffOperator.one(c)
        assert evaluate("(x1*x2 + 1)*finv", c) == DiffOperator.one(c)


class TestMapFile:
    BASE = "format: charpdiff-map/1\np: 3\nsource.n: 1\ntarget.n: 1\n"

    def test_minimal(self):
        phi = parse_map_text(self.BASE + "image.x1: x1\nimage.d1: d1\n").build()
        assert phi.size == 1 and phi.x_images[0].entries[0][0] == DiffOperator.x(phi.target, 1)

    @pytest.mark.parametrize("extra,where", [
        ("image.x1: x1\nimage.x1: x1\n", 6),
        ("bogus: 1\n", 5),
        ("p[1,1]: 3\n", 5),
        ("image.q1: x1\n", 5),
        ("just text\n", 5),
        ("image.x1:\n", 5),
    ])
    def test_line_errors(self, extra, where):
        with pytest.raises(MapFormatError) as info:
            parse_map_text(self.BASE + extra)
        assert info.value.line == where

    def test_bad_values(self):
        with pytest.raises(MapFormatError):
            parse_map_text(self.BASE.replace("p: 3", "p: three"))
        with pytest.raises(MapFormatError):
            parse_map_text("p: 3\nsource.n: 1\ntarget.n: 1\n")
        with pytest.raises(MapFormatError):
            parse_map_text(self.BASE + "image.x1[2,1]: x1\nimage.d1: d1\n").build()
        with pytest.raises(MapFormatError):
            parse_map_text(self.BASE + "image.x1: x1\nimage.d1: d1\nimage.finv: x1\n").build()
        with pytest.raises(MapFormatError):
            parse_map_text(self.BASE.replace("p: 3", "p: 6") + "image.x1: x1\nimage.d1: d1\n").build()


def _fuzz_values(rng):
    charts = [Chart.affine(3, 1), Chart.affine(5, 2), Chart(3, 1, {(1,): 1}),
              Chart(7, 2, {(1, 1): 1, (0, 0): 1}), Chart.affine(3, 2, 2), Chart(5, 1, {(1,): 1}, 2)]
    for k in range(500):
        chart = charts[k % len(charts)]
        kind = k % 3
        if kind == 0:
            yield chart, "operator", randgen.operator(rng, chart, 3, 3, 2, 4)
        elif kind == 1 and chart.e == 1:
            yield chart, "symbol", randgen.symbol(rng, chart, 3, 3, 2, 4)
        else:
            yield chart, "function", randgen.function(rng, chart, 4, 2, 4)


def test_round_trip_fuzz():
    rng = random.Random(2024)
    count = 0
    for chart, mode, value in _fuzz_values(rng):
        text = render_value(value)
        back = evaluate(text, chart, mode)
        assert back == value, text
        assert render_value(back) == text
        count += 1
    assert count == 500


def test_subprocess_entry_point():
    proc = subprocess.run([sys.executable, "-m", "charpdiff", "comm", "--p", "3", "d1", "x1"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout == "1\n"
    proc = subprocess.run([sys.executable, "-m", "charpdiff", "inv-i", "--p", "3", "x1*d1"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 1
    assert proc.stderr.startswith("charpdiff: error[NotInImage]")
