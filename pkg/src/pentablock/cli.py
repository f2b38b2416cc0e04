"""Command-line front end.

Exit codes
----------
0   success / member / criteria agree
1   non-member, or a Monte Carlo suite reported failures
2   inconclusive verdict, or disagreement between criteria outside the band
64  malformed input or usage error
65  a precondition on the input data failed (non-commuting triple, non-normal F, ...)
66  (s, p) lies outside the symmetrized bidisc
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import classify, geometry, models, multipliers
from .errors import InvalidInput, NotInvariant, OutsideGamma, PentablockError, ShapeError
from .linalg_kernel import ToleranceProfile, as_square, matrix_from_json
from .suites import SUITES, run_suite

EXIT_OK, EXIT_NONMEMBER, EXIT_INCONCLUSIVE = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_OUTSIDE = 64, 65, 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def _emit(obj, args):
    if args.pretty:
        print(json.dumps(obj, indent=2))
    else:
        print(json.dumps(obj, separators=(",", ":")))


def _pair(text: str) -> complex:
    try:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}") from None


def _verdict_exit(v) -> int:
    if v.is_member:
        return EXIT_OK
    return EXIT_INCONCLUSIVE if v.inconclusive else EXIT_NONMEMBER


# -- subcommands -------------------------------------------------------------


def cmd_classify_point(args, tol):
    q = geometry.PentaPoint.from_json(_read_json(args.input))
    verdicts = {
        "beta_formula": geometry.penta_membership(q, tol),
        "lambda_formula": geometry.penta_membership_lambda(q, tol),
        "psi_sup": geometry.penta_membership_psi(q, tol),
    }
    decided = {v.in_set for v in verdicts.values() if not v.inconclusive}
    agreement = len({v.in_set for v in verdicts.values()}) == 1
    out = {
        "point": q.to_json(),
        "verdicts": {k: v.to_json() for k, v in verdicts.items()},
        "agreement": agreement,
    }
    _emit(out, args)
    return EXIT_OK if len(decided) <= 1 else EXIT_INCONCLUSIVE


_TRIPLE_KINDS = ("p-unitary", "p-isometry", "quasi", "gamma-unitary", "gamma-isometry", "lemma25")


def cmd_classify_triple(args, tol):
    t = classify.OperatorTriple.from_json(_read_json(args.input))
    kind = args.kind
    if kind == "p-unitary":
        v = classify.p_unitary_check(t, args.route, tol, seed=args.seed)
    elif kind == "p-isometry":
        v = classify.p_isometry_check(t, tol)
    elif kind == "quasi":
        v = classify.quasi_p_unitary_check(t, tol)
    elif kind == "gamma-unitary":
        v = classify.gamma_unitary_check(t.T2, t.T3, tol, t.window)
    elif kind == "gamma-isometry":
        v = classify.gamma_isometry_check(t.T2, t.T3, tol, t.window)
    else:
        v = classify.lemma25_inequality_check(t, args.zgrid, tol)
    _emit(v.to_json(), args)
    return _verdict_exit(v)


def cmd_montecarlo(args, tol):
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    report = run_suite(args.suite, args.samples, args.seed, tol, workers=args.workers)
    _emit(report.to_json(), args)
    return EXIT_OK if report.fail_count == 0 else EXIT_NONMEMBER


def _parse_axis(text: str):
    try:
        a, b, n = text.split(":")
        a, b, n = complex(a.replace(" ", "")), complex(b.replace(" ", "")), int(n)
    except ValueError:
        raise UsageError(f"malformed grid axis {text!r}; expected START:STOP:COUNT") from None
    if n < 1:
        raise UsageError("grid axis needs at least one node")
    return [a] if n == 1 else [a + (b - a) * k / (n - 1) for k in range(n)]


def cmd_cross_section(args, tol):
    out = args.out
    svg = out is not None and out.lower().endswith(".svg")
    if args.section_grid is not None:
        if args.s is not None or args.p is not None:
            raise UsageError("use either --s/--p or --grid")
        if svg:
            raise UsageError("SVG output needs a single (s, p)")
        try:
            s_axis, p_axis = args.section_grid.split(",")
        except ValueError:
            raise UsageError("grid spec must be S0:S1:NS,P0:P1:NP") from None
        nodes = [(s, p) for s in _parse_axis(s_axis) for p in _parse_axis(p_axis)]
        text = geometry.cross_section_csv(geometry.cross_section_rows(nodes, tol))
    else:
        if args.s is None or args.p is None:
            raise UsageError("point mode needs both --s and --p")
        if svg:
            text = geometry.cross_section_svg(args.s, args.p, tol)
        else:
            r = geometry.cross_section(args.s, args.p, tol)
            text = geometry.cross_section_csv([(args.s, args.p, r)])
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return EXIT_OK


def _matrix_arg(path):
    obj = _read_json(path)
    return as_square(matrix_from_json(obj))


def cmd_model_build(args, tol):
    if args.kind == "symmetrization":
        m = models.symmetrization_model(args.n)
    elif args.kind == "pure-p-isometry":
        if args.F is None:
            raise UsageError("--F is required for pure-p-isometry")
        m = models.build_pure_p_isometry(_matrix_arg(args.F), args.n, tol)
    else:
        if args.N is None:
            raise UsageError("--N (triple JSON) is required for shift-tensor")
        base = classify.OperatorTriple.from_json(_read_json(args.N))
        m = models.build_shift_tensor(args.n, *base.ops, tol)
    _emit(m.to_json(), args)
    return EXIT_OK


def cmd_model_verify(args, tol):
    kind, _, _, t = models.model_from_json(_read_json(args.input))
    v = models.verify_model(kind, t, tol)
    _emit(v.to_json(), args)
    return _verdict_exit(v)


def cmd_wold(args, tol):
    obj = _read_json(args.input)
    if isinstance(obj, dict) and "T3" in obj:
        t = classify.OperatorTriple.from_json(obj)
        split = models.wold_triple_decompose(t, args.window, args.steps, tol)
        out = {
            "wold": split.wold.to_json(),
            "quasi": split.quasi.to_json(),
            "pure": split.pure.to_json(),
            "off_diagonal": split.off_diagonal,
        }
        certified = split.wold.certified
    else:
        r = models.wold_decompose(as_square(matrix_from_json(obj)), args.window, args.steps, tol)
        out, certified = r.to_json(), r.certified
    _emit(out, args)
    return EXIT_OK if certified else EXIT_INCONCLUSIVE


def cmd_fejer_riesz(args, tol):
    F = _matrix_arg(args.input)
    pair = models.fejer_riesz_normal(F, tol)
    v = models.verify_five_equations(F, pair, tol)
    _emit({"pair": pair.to_json(), "verdict": v.to_json()}, args)
    return _verdict_exit(v)


def cmd_blh_verify(args, tol):
    obj = _read_json(args.input)
    if not isinstance(obj, dict):
        raise UsageError("expected a JSON object with theta, phi1, phi2")
    try:
        theta, phi1, phi2 = (multipliers.TrigMatrixPoly.from_json(obj[k]) for k in ("theta", "phi1", "phi2"))
    except KeyError as exc:
        raise UsageError(f"missing key {exc}") from None
    grid = multipliers.CircleGrid(args.grid) if args.grid else None
    if "psi1" in obj and "psi2" in obj:
        psi1, psi2 = (multipliers.TrigMatrixPoly.from_json(obj[k]) for k in ("psi1", "psi2"))
        v = multipliers.blh_forward_check(theta, psi1, psi2, phi1, phi2, grid, tol)
        _emit(v.to_json(), args)
        return _verdict_exit(v)
    try:
        psi1, psi2, v = multipliers.blh_converse_extract(theta, phi1, phi2, grid, tol=tol)
    except NotInvariant as exc:
        out = {
            "is_member": False,
            "residuals": {"negative_mass": float(exc.negative_mass)},
            "route": "beurling-lax-halmos converse",
            "inconclusive": False,
        }
        _emit({"verdict": out, "error": str(exc)}, args)
        return EXIT_NONMEMBER
    _emit({"psi1": psi1.to_json(), "psi2": psi2.to_json(), "verdict": v.to_json()}, args)
    return _verdict_exit(v)


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pentablock", description="Numerical toolkit for the pentablock.")
    p.add_argument("--tol-identity", type=float, default=1e-9, help="residual bound for operator identities")
    p.add_argument("--tol-spectral", type=float, default=1e-8, help="eigenvalue clustering tolerance")
    p.add_argument("--band", type=float, default=1e-7, help="half-width of the inconclusive band")
    p.add_argument("--grid", type=int, default=None, help="circle grid size (power of two)")
    p.add_argument("--seed", type=int, default=0)
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    out.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    p.set_defaults(pretty=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify-point", help="run every pentablock criterion on one point")
    c.add_argument("--input", default="-", help="point JSON file ('-' for stdin)")
    c.set_defaults(func=cmd_classify_point)

    c = sub.add_parser("classify-triple", help="classify a commuting matrix triple")
    c.add_argument("--input", default="-")
    c.add_argument("--kind", choices=_TRIPLE_KINDS, required=True)
    c.add_argument("--route", choices=("spectral", "algebraic", "block", "all"), default="all")
    c.add_argument("--zgrid", type=int, default=32, help="polar grid size for lemma25")
    c.set_defaults(func=cmd_classify_triple)

    c = sub.add_parser("montecarlo", help="run a seeded verification suite")
    c.add_argument("--suite", choices=sorted(SUITES), required=True)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_montecarlo)

    c = sub.add_parser("cross-section", help="fibre radius over (s, p)")
    c.add_argument("--s", type=_pair, default=None, help="re,im")
    c.add_argument("--p", type=_pair, default=None, help="re,im")
    c.add_argument("--grid", dest="section_grid", default=None, help="S0:S1:NS,P0:P1:NP")
    c.add_argument("--out", default=None, help="output .csv or .svg (stdout CSV if omitted)")
    c.set_defaults(func=cmd_cross_section)

    m = sub.add_parser("model", help="build or verify truncated Hardy-space models")
    msub = m.add_subparsers(dest="model_command", required=True, parser_class=_Parser)
    c = msub.add_parser("build")
    c.add_argument("--kind", choices=("shift-tensor", "pure-p-isometry", "symmetrization"), required=True)
    c.add_argument("--n", type=int, required=True, help="truncation order")
    c.add_argument("--F", default=None, help="matrix JSON for pure-p-isometry")
    c.add_argument("--N", default=None, help="triple JSON for shift-tensor")
    c.set_defaults(func=cmd_model_build)
    c = msub.add_parser("verify")
    c.add_argument("--input", default="-")
    c.set_defaults(func=cmd_model_verify)

    c = sub.add_parser("wold", help="Wold-type split of a truncated isometry or triple")
    c.add_argument("--input", default="-", help="matrix JSON or triple JSON")
    c.add_argument("--window", type=int, required=True)
    c.add_argument("--steps", type=int, required=True)
    c.set_defaults(func=cmd_wold)

    c = sub.add_parser("fejer-riesz", help="closed-form factor for a normal contraction")
    c.add_argument("--input", default="-", help="matrix JSON for F")
    c.set_defaults(func=cmd_fejer_riesz)

    c = sub.add_parser("blh-verify", help="Beurling-Lax-Halmos forward check or extraction")
    c.add_argument("--input", default="-", help="JSON with theta, phi1, phi2 and optionally psi1, psi2")
    c.set_defaults(func=cmd_blh_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = ToleranceProfile(args.tol_identity, args.tol_spectral, args.band)
        return args.func(args, tol)
    except (UsageError, InvalidInput, ShapeError) as exc:
        print(f"pentablock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutsideGamma as exc:
        print(f"pentablock: error: {exc}", file=sys.stderr)
        return EXIT_OUTSIDE
    except PentablockError as exc:
        print(f"pentablock: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
