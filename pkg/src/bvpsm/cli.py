"""Command-line front end.

Every sub-command runs one check and emits a report, as text or JSON.
Exit status: 0 when every residual vanishes, 1 when one does not, 2 on a
usage error (bad flags, unparsable input, caps exceeded).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .expr import GRAMMAR, DegreeExceeded, ParseError, parse_poly
from .field_theory import (
    NO_BC,
    PSM_BC,
    SigmaModel,
    TermLimitExceeded,
    antibracket,
    apply_D,
    brst_square,
    build_S_check,
    build_S_hat,
    classical_action,
    classical_action_direct,
    diffeo_variation,
    master_equation,
    pullback_ev,
    stokes_check,
)
from .graded import HETEROGENEOUS, GradedPoly, Kind, left_derivative
from .report import Report, Residual
from .target import (
    Multivector,
    PoissonCandidate,
    TargetChart,
    bivector_components,
    hamiltonian_vf,
    jacobi_check,
    lie_derivative_bivector,
    s_xi,
    schouten_bracket,
)

__all__ = ["main", "run", "REPORT_SCHEMA", "COMMANDS", "UsageError"]

MAX_DIM = 8
DEFAULT_MAX_DEGREE = 6
DEFAULT_MAX_TERMS = 10**6

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "bvpsm check report",
    "type": "object",
    "required": ["schema", "command", "inputs", "status", "residuals", "outputs", "timing_ms"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": 1},
        "command": {"type": "string"},
        "inputs": {"type": "object", "additionalProperties": {"type": ["string", "integer", "array", "null"]}},
        "status": {"enum": ["pass", "fail"]},
        "residuals": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind", "poly", "zero"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"enum": ["bulk", "boundary"]},
                    "poly": {"type": "string"},
                    "zero": {"type": "boolean"},
                },
            },
        },
        "outputs": {"type": "object", "additionalProperties": {"type": "string"}},
        "timing_ms": {"type": "number", "minimum": 0},
    },
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- inputs ------------------------------------------------------------------------


def _chart(args) -> TargetChart:
    if args.dim < 1:
        raise UsageError("--dim must be positive")
    if args.dim > args.max_dim:
        raise UsageError(f"--dim {args.dim} exceeds the cap {args.max_dim} (raise it with --max-dim)")
    return TargetChart(args.dim)


def _poly(src: str, chart: TargetChart, args, flag: str) -> GradedPoly:
    try:
        return parse_poly(src, chart, args.max_degree)
    except ParseError as e:
        raise UsageError(f"{flag}: {e}\ngrammar:\n{GRAMMAR}") from None
    except DegreeExceeded as e:
        raise UsageError(f"{flag}: {e}") from None


def _candidate(chart, args) -> PoissonCandidate:
    body = _poly(args.alpha, chart, args, "--alpha")
    try:
        return PoissonCandidate(Multivector(chart, body))
    except ValueError as e:
        raise UsageError(f"--alpha: {e}") from None


def _xi(chart, args) -> list[GradedPoly]:
    if args.xi is None:
        raise UsageError("--xi is required")
    parts = args.xi.split(",")
    if len(parts) != chart.dim:
        raise UsageError(f"--xi needs {chart.dim} comma-separated components, got {len(parts)}")
    comps = [_poly(s, chart, args, f"--xi[{k}]") for k, s in enumerate(parts, 1)]
    for k, c in enumerate(comps, 1):
        if any(g.kind is Kind.FiberCoord for g in c.generators()):
            raise UsageError(f"--xi[{k}]: vector field components are functions of x only")
    return comps


def _bc(args):
    return PSM_BC if args.bc == "psm" else NO_BC


def _max_terms() -> int:
    raw = os.environ.get("BVPSM_MAX_TERMS")
    if raw is None:
        return DEFAULT_MAX_TERMS
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"BVPSM_MAX_TERMS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("BVPSM_MAX_TERMS must be positive")
    return n


# --- commands ----------------------------------------------------------------------
# each returns (report, outputs) with outputs a dict of name -> printable value


def cmd_jacobi(args):
    chart = _chart(args)
    c = _candidate(chart, args)
    rep = jacobi_check(c)
    return rep, {"S_alpha": str(c.alpha.body)}


def cmd_schouten(args):
    chart = _chart(args)
    if args.xi is not None:
        c = _candidate(chart, args)
        xi = _xi(chart, args)
        lhs = schouten_bracket(s_xi(chart, xi), c.alpha)
        L = lie_derivative_bivector(chart, xi, c)
        rep = Report("schouten", (Residual("[S_xi,S_alpha] - S_(L_xi alpha)", (lhs - L.alpha).body),))
        return rep, {"[S_xi,S_alpha]": str(lhs.body), "S_(L_xi alpha)": str(L.alpha.body)}
    if args.rhs is None:
        raise UsageError("schouten needs --rhs G (bracket [alpha, G]) or --xi")
    F = Multivector(chart, _poly(args.alpha, chart, args, "--alpha"))
    G = Multivector(chart, _poly(args.rhs, chart, args, "--rhs"))
    for name, M in (("--alpha", F), ("--rhs", G)):
        if M.ghost is HETEROGENEOUS:
            raise UsageError(f"{name}: shifted antisymmetry needs a homogeneous multivector")
    fg = schouten_bracket(F, G)
    gf = schouten_bracket(G, F)
    sign = -1 if ((F.ghost + 1) * (G.ghost + 1)) % 2 == 0 else 1
    resid = fg.body - gf.body.scale(sign)
    rep = Report("schouten", (Residual("[F,G] + (-1)^((|F|+1)(|G|+1)) [G,F]", resid),))
    return rep, {"[F,G]": str(fg.body)}


def cmd_ham_vf(args):
    chart = _chart(args)
    F = Multivector(chart, _poly(args.alpha, chart, args, "--alpha"))
    X = hamiltonian_vf(F)
    residuals = []
    for g in chart.x + chart.p:
        G = Multivector(chart, GradedPoly.gen(g))
        residuals.append(Residual(f"X_F({g}) + [F,{g}]", X(G) + schouten_bracket(F, G).body))
    if F.body and F.p_degrees() == {2}:
        # compare with alpha^ij p_j d/dx^i + 1/2 d_i alpha^jk p_j p_k d/dp_i
        comps = bivector_components(F)
        m = chart.dim
        full = {}
        for (i, j), a in comps.items():
            full[(i, j)], full[(j, i)] = a, -a
        for i in range(1, m + 1):
            want_x = GradedPoly()
            want_p = GradedPoly()
            for j in range(1, m + 1):
                if (i, j) in full:
                    want_x = want_x + full[(i, j)] * chart.ps(j)
                for k in range(1, m + 1):
                    if (j, k) in full:
                        d = left_derivative(full[(j, k)], chart.x[i - 1])
                        want_p = want_p + (d * chart.ps(j) * chart.ps(k)).scale(Fraction(1, 2))
            residuals.append(Residual(f"d/dx{i} coefficient - alpha^{i}j p_j", X.x_part[i - 1] - want_x))
            residuals.append(Residual(f"d/dp{i} coefficient - 1/2 d_{i} alpha^jk p_j p_k", X.p_part[i - 1] - want_p))
    outputs = {}
    for i in range(chart.dim):
        outputs[f"d/dx{i + 1}"] = str(X.x_part[i])
    for i in range(chart.dim):
        outputs[f"d/dp{i + 1}"] = str(X.p_part[i])
    return Report("ham-vf", tuple(residuals)), outputs


def cmd_bv_action(args):
    chart = _chart(args)
    c = _candidate(chart, args)
    model = SigmaModel(chart, boundary=True, max_terms=_max_terms())
    Sh = build_S_hat(model)
    Sc = build_S_check(model, c)
    bc = _bc(args)
    rep = antibracket(Sh, Sh, bc)
    rep = Report(
        "bv-action",
        tuple(Residual(f"(S_hat,S_hat) {r.label}", r.poly, r.kind) for r in rep.residuals),
    )
    outputs = {
        "S_hat": str(Sh.bulk),
        "S_check": str(Sc.bulk),
        "S_check ledger": str(Sc.boundary),
        "ghost": str((Sh + Sc).ghost),
    }
    return rep, outputs


def cmd_master_eq(args):
    chart = _chart(args)
    c = _candidate(chart, args)
    rep = master_equation(c, _bc(args), boundary=not args.closed, max_terms=_max_terms())
    out = {
        "[alpha,alpha]": str(rep.details["jacobi"]),
        "bulk equals transgression of [alpha,alpha]": str(rep.details["bulk_matches_jacobi"]).lower(),
    }
    if not args.closed:
        out["ledger"] = str(rep.details["ledger"])
    return rep, out


def cmd_brst(args):
    chart = _chart(args)
    c = _candidate(chart, args)
    rep = brst_square(c, _max_terms())
    table = rep.details["table"]
    out = {f"delta {g}": str(table[g]) for g in sorted(table, key=lambda g: g.key)}
    return rep, out


def cmd_classical(args):
    chart = _chart(args)
    c = _candidate(chart, args)
    mt = _max_terms()
    got = classical_action(c, mt)
    want = classical_action_direct(c)
    rep = Report("classical", (Residual("S|antifields=0 - S_cl", got - want),))
    return rep, {"S_cl": str(got)}


def cmd_diffeo(args):
    chart = _chart(args)
    c = _candidate(chart, args)
    xi = _xi(chart, args)
    rep = diffeo_variation(c, xi, _bc(args), boundary=not args.closed, max_terms=_max_terms())
    return rep, {"L_xi alpha": str(rep.details["lie_derivative"]), "(S_hat,S_xi) ledger": str(rep.details["ledger"])}


def cmd_stokes_demo(args):
    chart = _chart(args)
    src = args.alpha if args.alpha is not None else "x1*p1"
    f = pullback_ev(SigmaModel(chart, max_terms=_max_terms()), _poly(src, chart, args, "--alpha"))
    model = SigmaModel(chart, max_terms=_max_terms())
    rep = stokes_check(model, f)
    return rep, {"f": str(f), "D f": str(apply_D(f)), "ledger": str(rep.details["ledger"])}


COMMANDS: dict[str, tuple[Callable, str]] = {
    "jacobi": (cmd_jacobi, "residual [S_alpha, S_alpha]; zero iff alpha is Poisson"),
    "schouten": (cmd_schouten, "bracket [alpha, rhs] with its antisymmetry check, or [S_xi, S_alpha] vs the Lie derivative"),
    "ham-vf": (cmd_ham_vf, "Hamiltonian vector field of --alpha"),
    "bv-action": (cmd_bv_action, "components of S_hat and S_check; (S_hat, S_hat)"),
    "master-eq": (cmd_master_eq, "classical master equation (S, S) = 0, bulk and boundary"),
    "brst": (cmd_brst, "BRST variations at zero antifields and delta^2 on X, beta"),
    "classical": (cmd_classical, "antifield-free part of the action vs the classical action"),
    "diffeo": (cmd_diffeo, "infinitesimal target diffeomorphism identities for --xi"),
    "stokes-demo": (cmd_stokes_demo, "int D f has no bulk and its ledger is the boundary integral of f"),
}

_NEEDS_ALPHA = {"jacobi", "schouten", "ham-vf", "bv-action", "master-eq", "brst", "classical", "diffeo"}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bvpsm", description="Exact checks for the BV formulation of the Poisson sigma model.")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_, epilog="expression grammar:\n" + GRAMMAR,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--dim", type=int, required=True, help="target dimension m")
        sp.add_argument("--alpha", required=name in _NEEDS_ALPHA, help="S_alpha (or F) as a polynomial in x, p")
        sp.add_argument("--xi", help="vector field components, comma separated")
        sp.add_argument("--rhs", help="second argument of schouten")
        sp.add_argument("--bc", choices=("none", "psm"), default="psm")
        sp.add_argument("--closed", action="store_true", help="closed surface: no boundary ledger")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE)
        sp.add_argument("--max-dim", type=int, default=MAX_DIM)
    return p


def _inputs(args) -> dict:
    out = {"dim": args.dim}
    for key in ("alpha", "xi", "rhs"):
        val = getattr(args, key)
        if val is not None:
            out[key] = val
    if args.command in ("master-eq", "diffeo", "bv-action"):
        out["bc"] = "closed" if args.closed else args.bc
    return out


def _canonical_inputs(args) -> dict:
    # echo inputs in canonical form when they parse
    out = _inputs(args)
    chart = TargetChart(args.dim)
    for key in ("alpha", "rhs"):
        if key in out:
            out[key] = str(parse_poly(out[key], chart))
    if "xi" in out:
        out["xi"] = [str(parse_poly(s, chart)) for s in out["xi"].split(",")]
    return out


_EXPR_FLAGS = ("--alpha", "--xi", "--rhs")


def _glue_expr_values(argv: Sequence[str]) -> list[str]:
    # argparse would read a value such as "-1/2*p1*p2" as an option
    out, it = [], iter(argv)
    for tok in it:
        if tok in _EXPR_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str]) -> tuple[int, dict, str]:
    """Execute a command line; returns (exit code, report or error dict, output format)."""
    try:
        args = build_parser().parse_args(_glue_expr_values(argv))
    except UsageError as e:
        return 2, {"error": str(e)}, "text"
    start = time.perf_counter()
    try:
        rep, outputs = COMMANDS[args.command][0](args)
    except (UsageError, TermLimitExceeded) as e:
        return 2, {"error": str(e)}, args.format
    elapsed = (time.perf_counter() - start) * 1000
    doc = {
        "schema": 1,
        "command": args.command,
        "inputs": _canonical_inputs(args),
        "status": "pass" if rep.passed else "fail",
        "residuals": [
            {"name": r.label, "kind": r.kind, "poly": str(r.poly), "zero": r.vanishes} for r in rep.residuals
        ],
        "outputs": outputs,
        "timing_ms": round(elapsed, 3),
    }
    return (0 if rep.passed else 1), doc, args.format


def render_text(doc: dict) -> str:
    lines = [f"command: {doc['command']}", f"status: {doc['status']}"]
    for k, v in doc["inputs"].items():
        lines.append(f"input {k}: {', '.join(v) if isinstance(v, list) else v}")
    for r in doc["residuals"]:
        lines.append(f"residual [{r['kind']}] {r['name']}: {r['poly']}")
    for k, v in doc["outputs"].items():
        lines.append(f"{k}: {v}")
    lines.append(f"timing_ms: {doc['timing_ms']}")
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, doc, fmt = run(sys.argv[1:] if argv is None else argv)
    if code == 2:
        print(f"bvpsm: error: {doc['error']}", file=sys.stderr)
        return 2
    if fmt == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(render_text(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
