import json
import random
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest

from bvpsm import TargetChart
from bvpsm.cli import COMMANDS, REPORT_SCHEMA, main, run
from bvpsm.expr import (
    Add,
    IndexOutOfRange,
    Mul,
    Neg,
    Num,
    ParseError,
    Pow,
    Sym,
    UnknownSymbol,
    parse,
    parse_poly,
)

from support import rand_multivector, rand_x_poly

SO3 = "x3*p1*p2 + x1*p2*p3 + x2*p3*p1"
C3 = TargetChart(3)

CORPUS = [
    "p1*p2",
    SO3,
    "p1*p1",
    "0",
    "-1/2*x1^2*p2 + 3*x2",
    "(x1 + x2)^3*p1",
    "x1*(p1 - p2)*p3",
    "2/4*x3",
    "- -x1",
    "x1 -\n x2",
]


def test_ast_shapes():
    assert parse("1 + 2*x1") == Add(Num(1), Mul(Num(2), Sym("x", 1)))
    assert parse("1 + 2*x1").right.right.col == 7
    assert parse("x2^3") == Pow(Sym("x", 2), 3)
    assert parse("-p1") == Neg(Sym("p", 1))
    assert parse("x1 - x2") == Add(Sym("x", 1), Sym("x", 2), -1)
    assert parse("3/6") == Num(Fraction(1, 2))


def test_so3_input_matches_structure_constants():
    # alpha^ij = eps^ijk x_k, i.e. S = x3 p1p2 + x1 p2p3 + x2 p3p1
    S = parse_poly(SO3, C3)
    x, p = C3.xs, C3.ps
    assert S == x(3) * p(1) * p(2) + x(1) * p(2) * p(3) - x(2) * p(1) * p(3)


def test_odd_square_is_zero():
    assert parse_poly("p1*p1", C3).is_zero()


@pytest.mark.parametrize(
    "src,exc,line,col",
    [
        ("x1 +", ParseError, 1, 5),
        ("x1 + y2", UnknownSymbol, 1, 6),
        ("theta1", UnknownSymbol, 1, 1),
        ("x1*\n  x4", IndexOutOfRange, 2, 3),
        ("p0", IndexOutOfRange, 1, 1),
        ("(x1", ParseError, 1, 4),
        ("x1 x2", ParseError, 1, 4),
        ("x1^p1", ParseError, 1, 4),
        ("1/0", ParseError, 1, 3),
        ("x1 $", ParseError, 1, 4),
        ("", ParseError, 1, 1),
    ],
)
def test_parse_errors_carry_position(src, exc, line, col):
    with pytest.raises(exc) as e:
        parse_poly(src, C3)
    assert (e.value.line, e.value.col) == (line, col)


def test_round_trip_fixpoint():
    for src in CORPUS:
        P = parse_poly(src, C3)
        text = str(P)
        assert str(parse_poly(text, C3)) == text
    rng = random.Random(20)
    for _ in range(100):
        P = rand_multivector(rng, C3, rng.randint(0, 3)).body + rand_x_poly(rng, C3, 3)
        assert parse_poly(str(P), C3) == P


def _json(argv, capsys):
    code = main(list(argv) + ["--format", "json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


ALL_COMMANDS = [
    ["jacobi", "--dim", "3", "--alpha", SO3],
    ["schouten", "--dim", "2", "--alpha", "x1*p1", "--rhs", "x2*p1*p2"],
    ["schouten", "--dim", "3", "--alpha", SO3, "--xi", "x2,-x1,x3^2"],
    ["ham-vf", "--dim", "3", "--alpha", SO3],
    ["bv-action", "--dim", "2", "--alpha", "x1*p1*p2"],
    ["master-eq", "--dim", "3", "--alpha", SO3, "--bc", "psm"],
    ["master-eq", "--dim", "3", "--alpha", SO3, "--closed"],
    ["brst", "--dim", "2", "--alpha", "p1*p2"],
    ["classical", "--dim", "3", "--alpha", SO3],
    ["diffeo", "--dim", "3", "--alpha", SO3, "--xi", "x2,-x1,0"],
    ["stokes-demo", "--dim", "2"],
]


def test_every_command_is_exercised():
    assert {a[0] for a in ALL_COMMANDS} == set(COMMANDS)


@pytest.mark.parametrize("argv", ALL_COMMANDS, ids=lambda a: a[0])
def test_json_reports_validate(argv, capsys):
    code, doc = _json(argv, capsys)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert code == 0 and doc["status"] == "pass"
    assert all(r["zero"] for r in doc["residuals"])


def test_status_tracks_residuals(capsys):
    code, doc = _json(["jacobi", "--dim", "3", "--alpha", "x2*p1*p2 + p2*p3"], capsys)
    assert code == 1 and doc["status"] == "fail"
    assert doc["residuals"][0]["poly"] == "-2/1*p1*p2*p3"
    jsonschema.validate(doc, REPORT_SCHEMA)


def test_master_eq_without_bc_fails(capsys):
    code, doc = _json(["master-eq", "--dim", "3", "--alpha", SO3, "--bc", "none"], capsys)
    assert code == 1
    kinds = {r["kind"]: r["zero"] for r in doc["residuals"]}
    assert kinds == {"bulk": True, "boundary": False}


def test_brst_table_constant_alpha(capsys):
    code, doc = _json(["brst", "--dim", "2", "--alpha", "p1*p2"], capsys)
    assert code == 0
    assert doc["outputs"]["delta X^1"] == "1/1*beta_2"
    assert doc["outputs"]["delta X^2"] == "-1/1*beta_1"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate", "--dim", "2"],
        ["jacobi", "--dim", "2"],
        ["jacobi", "--dim", "2", "--alpha", "y1"],
        ["jacobi", "--dim", "2", "--alpha", "x3*p1*p2"],
        ["jacobi", "--dim", "9", "--alpha", "p1*p2"],
        ["jacobi", "--dim", "0", "--alpha", "p1*p2"],
        ["jacobi", "--dim", "2", "--alpha", "x1^7*p1*p2"],
        ["jacobi", "--dim", "2", "--alpha", "p1"],
        ["diffeo", "--dim", "2", "--alpha", "p1*p2", "--xi", "x1"],
        ["diffeo", "--dim", "2", "--alpha", "p1*p2", "--xi", "p1,x1"],
        ["master-eq", "--dim", "2", "--alpha", "p1*p2", "--bc", "free"],
        ["schouten", "--dim", "2", "--alpha", "x1"],
        ["schouten", "--dim", "2", "--alpha", "x1 + p1", "--rhs", "p2"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_caps_are_overridable(capsys):
    assert main(["jacobi", "--dim", "9", "--max-dim", "9", "--alpha", "p1*p2"]) == 0
    assert main(["jacobi", "--dim", "2", "--max-degree", "7", "--alpha", "x1^7*p1*p2"]) == 0


def test_term_cap_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("BVPSM_MAX_TERMS", "10")
    assert main(["master-eq", "--dim", "3", "--alpha", SO3]) == 2
    assert "exceed" in capsys.readouterr().err
    monkeypatch.setenv("BVPSM_MAX_TERMS", "lots")
    assert main(["master-eq", "--dim", "3", "--alpha", SO3]) == 2


def test_usage_error_reports_grammar(capsys):
    main(["jacobi", "--dim", "2", "--alpha", "x1 +* p1"])
    err = capsys.readouterr().err
    assert "1:5" in err and "expr" in err


def test_determinism_modulo_timing():
    argv = ["master-eq", "--dim", "3", "--alpha", SO3]
    a, b = run(argv)[1], run(argv)[1]
    a.pop("timing_ms"), b.pop("timing_ms")
    assert json.dumps(a) == json.dumps(b)


def test_exit_codes_random(capsys):
    rng = random.Random(21)
    chart = TargetChart(3)
    for _ in range(15):
        alpha = str(rand_multivector(rng, chart, 2, 1).body)
        if alpha == "0":
            continue
        code, doc = _json(["jacobi", "--dim", "3", "--alpha", alpha], capsys)
        assert code == (0 if doc["status"] == "pass" else 1)
        garbage = alpha.replace("*", "**", 1)
        assert main(["jacobi", "--dim", "3", "--alpha", garbage]) == 2
        capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bvpsm", "jacobi", "--dim", "2", "--alpha", "p1*p2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "status: pass" in proc.stdout


def test_text_report_lines(capsys):
    main(["jacobi", "--dim", "2", "--alpha", "p1*p2"])
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "command: jacobi"
    assert out[1] == "status: pass"
    assert out[-1].startswith("timing_ms: ")


def test_zero_alpha_is_legal(capsys):
    assert main(["master-eq", "--dim", "2", "--alpha", "0"]) == 0
    assert "input alpha: 0" in capsys.readouterr().out


def test_expression_may_start_with_minus():
    assert run(["jacobi", "--dim", "2", "--alpha", "-1/2*p1*p2"])[0] == 0
    assert run(["diffeo", "--dim", "2", "--alpha", "p1*p2", "--xi", "-x2,x1"])[0] == 0
