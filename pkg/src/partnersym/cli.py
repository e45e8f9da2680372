"""Command-line front end.

Every subcommand prints one JSON document (or CSV for ``grid``) and exits
with 0 when the verification passes, 1 when it fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .catalog import (EQUATION_NAMES, NamedEquation, PdeCoefficients, classify,
                      general_residual, named_equation, residual_at)
from .exprcore import ETA_XI, TPQY, Expression, Point, get_chart, parse_expression
from .exprcore.charts import ChartError
from .exprcore.expression import IntegrationError, NotLinearError
from .exprcore.parsing import ParseError
from .exprcore.scalars import Scalar, format_scalar, scalar
from .geometry import (DEFAULT_CURVATURE_TOL, FAMILIES, FAMILY_CHARTS, GeometryError, random_point,
                       ricci_flat_scan)
from .jetalg import JetPoly
from .legendre import (SPECS, LegendreError, get_spec, husain_mixed_bridge, legendre_jet,
                       legendre_quadratic, legendre_solve)
from .lift import (LambdaUndefined, PolyParams, constraint_residuals, exp_solution, lambda_diagnostic,
                   linear_residuals, load_modes, poly_solution, to_tpqy)
from .linalg import SingularMatrixError
from .symmetry import PreconditionError, build_recursion, verify_partner

DEFAULT_RESIDUAL_TOL = 1e-9

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# -- shared helpers ------------------------------------------------------------


def _fmt(x) -> str:
    return format_scalar(x)


def _point_dict(pt: Point) -> dict:
    return {k: _fmt(v) for k, v in pt.as_dict().items()}


def _resolve_mode(args, potential: Optional[Expression]) -> bool:
    """True for exact arithmetic."""
    exact_ok = potential is None or (potential.exact and potential.is_polynomial())
    if args.mode == "exact":
        if not exact_ok:
            raise UsageError("exact mode needs a polynomial potential with rational coefficients")
        return True
    if args.mode == "float":
        return False
    return exact_ok


def _small(value, exact: bool, tol: float) -> bool:
    return value == 0 if exact else abs(value) <= tol


def _sample_points(chart, n: int, seed: int, exact: bool) -> list[Point]:
    rng = random.Random(seed)
    return [random_point(chart, rng, exact) for _ in range(n)]


def _family_potential(args, chart=None) -> Expression:
    """``--potential``, ``--poly`` or ``--modes``; family solutions are rewritten on ``chart``."""
    given = [x for x in (args.potential, getattr(args, "poly", None), getattr(args, "modes", None)) if x]
    if len(given) != 1:
        raise UsageError("give exactly one of --potential, --poly, --modes")
    if args.potential:
        return parse_expression(args.potential, chart)
    if getattr(args, "poly", None):
        v = poly_solution(PolyParams.parse(args.poly))
    else:
        with open(args.modes, encoding="utf-8") as fh:
            v = exp_solution(load_modes(fh.read()))
    if chart is None or get_chart(chart) == ETA_XI:
        return v
    if get_chart(chart) == TPQY:
        return to_tpqy(v)
    raise UsageError(f"family solutions live on {ETA_XI} or {TPQY}, not {chart}")


def _equation(args) -> NamedEquation:
    if args.eq == "general":
        if not args.coeffs:
            raise UsageError("--eq general needs --coeffs")
        co = PdeCoefficients.parse(args.coeffs)
        return NamedEquation("general", classify(co).case, scalar(0), general_residual(co),
                             get_chart("txyz"), "u", co)
    co = PdeCoefficients.parse(args.coeffs) if args.coeffs else None
    if args.eq == "asymmetric":
        abc = {"a": 1, "b": 0, "c": 0}
        if args.abc:
            for item in args.abc.split(","):
                k, _, v = item.partition("=")
                if k.strip() not in abc:
                    raise UsageError(f"bad --abc entry {item!r}")
                abc[k.strip()] = scalar(v.strip())
        return named_equation("asymmetric", args.eps, **abc)
    return named_equation(args.eq, args.eps, coefficients=co)


# -- subcommands ---------------------------------------------------------------


def cmd_classify(args) -> tuple[dict, int]:
    c = PdeCoefficients.parse(args.coeffs)
    result = classify(c)
    return {"coefficients": c.to_text(), **result.as_dict()}, EXIT_PASS


def cmd_residual(args) -> tuple[dict, int]:
    eq = _equation(args)
    u = parse_expression(args.potential, eq.chart)
    exact = _resolve_mode(args, u)
    worst: Scalar = Fraction(0)
    for pt in _sample_points(eq.chart, args.points, args.seed, exact):
        r = residual_at(eq, u, pt)
        worst = r if abs(r) > abs(worst) else worst
    ok = _small(worst, exact, args.tol)
    return {"equation": eq.name, "eps": _fmt(eq.eps), "potential": str(u), "points": args.points,
            "mode": "exact" if exact else "float", "max_residual": _fmt(abs(worst)), "pass": ok}, \
        EXIT_PASS if ok else EXIT_FAIL


def cmd_recursion(args) -> tuple[dict, int]:
    if args.coeffs and args.eq:
        raise UsageError("give --coeffs or --eq, not both")
    if args.eq:
        eq = _equation(args)
        co, chart, dep = eq.coefficients, eq.chart, eq.dep
        if co is None:
            raise UsageError(f"equation {eq.name} is not written with general coefficients")
    elif args.coeffs:
        eq = None
        co, chart, dep = PdeCoefficients.parse(args.coeffs), get_chart("txyz"), "u"
    else:
        raise UsageError("recursion needs --coeffs or --eq")
    if args.omega0 is not None:
        omega0 = scalar(args.omega0)
    elif args.phi is not None:
        omega0 = scalar(0)  # verification needs a number; the partner property holds for any value
    else:
        omega0 = JetPoly.param("omega0", chart)
    r = build_recursion(co, omega0, chart, dep)
    t, x = chart.variables[:2]
    doc = {"coefficients": co.to_text(), f"psi_{t}": str(r.psi_t()), f"psi_{x}": str(r.psi_x())}
    if args.phi is None:
        return doc, EXIT_PASS
    if eq is None or not args.potential:
        raise UsageError("--phi needs --eq and --potential")
    u = parse_expression(args.potential, chart)
    phi = parse_expression(args.phi, chart)
    exact = _resolve_mode(args, u) and phi.exact and phi.is_polynomial()
    pts = _sample_points(chart, args.points, args.seed, exact)
    rep = verify_partner(eq, u, phi, r, pts, args.tol)
    doc.update(rep.as_dict())
    return doc, EXIT_PASS if rep.passed else EXIT_FAIL


def _linear_and_legmix(v: Expression, args, exact: bool) -> dict:
    lin = linear_residuals(v)
    pts = _sample_points(ETA_XI, args.points, args.seed, exact)
    if exact:
        lin_max = Fraction(0) if lin.is_zero() else max(abs(x) for p in pts for x in lin.at(p))
    else:
        lin_max = max((abs(x) for p in pts for x in lin.at(p)), default=0.0)
    legmix = named_equation("legmix", 1)
    w = to_tpqy(v)
    tpts = _sample_points(TPQY, args.points, args.seed + 1, exact)
    leg_max = max((abs(residual_at(legmix, w, p)) for p in tpts), default=Fraction(0))
    lam = []
    for p in tpts:
        try:
            lam.append(lambda_diagnostic(w, p, 1, tol=0 if exact else 1e-12))
        except LambdaUndefined:
            continue
    lam_dev = max((abs(x + 1) for x in lam), default=Fraction(0))
    ok = (_small(lin_max, exact, args.tol) and _small(leg_max, exact, args.tol)
          and _small(lam_dev, exact, max(args.tol, 1e-9)))
    return {"expression": str(v), "points": args.points, "mode": "exact" if exact else "float",
            "linear_identically_zero": lin.is_zero(), "max_linear_residual": _fmt(lin_max),
            "max_legmix_residual": _fmt(leg_max), "lambda_points": len(lam),
            "max_lambda_deviation": _fmt(lam_dev), "pass": ok}


def cmd_lift_exp(args) -> tuple[dict, int]:
    with open(args.modes, encoding="utf-8") as fh:
        modes = load_modes(fh.read())
    v = exp_solution(modes)
    if args.mode == "exact":
        raise UsageError("exponential solutions are evaluated in float mode")
    doc = _linear_and_legmix(v, args, False)
    doc["modes"] = [m.as_dict() for m in modes]
    return doc, EXIT_PASS if doc["pass"] else EXIT_FAIL


def cmd_lift_poly(args) -> tuple[dict, int]:
    p = PolyParams.parse(args.poly)
    v = poly_solution(p)
    exact = _resolve_mode(args, v)
    doc = _linear_and_legmix(v, args, exact)
    doc["params"] = p.as_dict()
    return doc, EXIT_PASS if doc["pass"] else EXIT_FAIL


def cmd_constraints(args) -> tuple[dict, int]:
    v = _family_potential(args, TPQY)
    eps = scalar(args.eps)
    lam = -eps if args.lam is None else scalar(args.lam)
    exact = _resolve_mode(args, v)
    res = constraint_residuals(v, eps, lam)
    pts = _sample_points(TPQY, args.points, args.seed, exact)
    worst = {name: Fraction(0) for name in ("r_leg2", "r_931", "r_932")}
    for p in pts:
        for name, val in zip(worst, res.at(p)):
            if abs(val) > abs(worst[name]):
                worst[name] = val
    ok = all(_small(x, exact, args.tol) for x in worst.values())
    return {"potential": str(v), "eps": _fmt(eps), "lambda": _fmt(lam), "points": args.points,
            "mode": "exact" if exact else "float", "identically_zero": res.is_zero(),
            **{k: _fmt(x) for k, x in worst.items()}, "pass": ok}, EXIT_PASS if ok else EXIT_FAIL


def cmd_legendre(args) -> tuple[dict, int]:
    if args.bridge:
        lam = parse_expression(args.potential, "tpyz")
        exact = _resolve_mode(args, lam)
        rep = husain_mixed_bridge(lam, _sample_points(lam.chart, args.points, args.seed, exact), args.tol)
        return {"potential": str(lam), **rep.as_dict()}, EXIT_PASS if rep.passed else EXIT_FAIL
    spec = get_spec(args.transform)
    u = parse_expression(args.potential, spec.source)
    doc = {"transform": spec.kind, "source": spec.source.name, "target": spec.target.name,
           "potential": str(u)}
    ok = True
    if u.is_polynomial() and u.degree() <= 2:
        v = legendre_quadratic(u, spec)
        back = legendre_quadratic(v, spec.inverse())
        doc["transformed"] = str(v)
        doc["involution"] = back == u
        ok = ok and doc["involution"]
    exact = _resolve_mode(args, u)
    worst = 0.0
    pts = _sample_points(spec.source, args.points, args.seed, exact)
    samples = []
    from .exprcore import jet

    for pt in pts:
        fwd = legendre_jet(jet(u, pt, 2), spec)
        back_pt = legendre_solve(u, fwd.point, spec)
        err = max(abs(a - b) for a, b in zip(back_pt.coords, pt.coords))
        worst = max(worst, float(err))
        samples.append({"point": _point_dict(pt), "mapped": _point_dict(fwd.point), "value": _fmt(fwd.value)})
    doc["points"] = len(pts)
    doc["max_roundtrip_error"] = _fmt(worst)
    doc["samples"] = samples[: args.show]
    ok = ok and worst <= max(args.tol, 1e-9)
    doc["pass"] = ok
    return doc, EXIT_PASS if ok else EXIT_FAIL


def _scan(args):
    chart = FAMILY_CHARTS[args.family]
    pot = _family_potential(args, chart)
    exact = _resolve_mode(args, pot)
    tol = DEFAULT_CURVATURE_TOL if args.tol is None else args.tol
    return ricci_flat_scan(args.family, pot, args.eps, args.points, args.seed, exact=exact,
                           tolerance=tol, require_solution=not args.allow_nonsolution)


def cmd_ricci(args) -> tuple[dict, int]:
    rep = _scan(args)
    return rep.as_dict(), EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_grid(args):
    rep = _scan(args)
    if args.format == "json":
        doc = rep.as_dict()
        doc["samples"] = [{"point": _point_dict(s.point), "max_ricci": _fmt(s.max_ricci),
                           "det_g": _fmt(s.det),
                           "denominators": {k: _fmt(v) for k, v in s.denominators.items()}}
                          for s in rep.samples]
        return doc, EXIT_PASS if rep.passed else EXIT_FAIL
    return rep.to_csv(), EXIT_PASS if rep.passed else EXIT_FAIL


# -- parser --------------------------------------------------------------------


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _eps(text: str):
    value = scalar(text)
    if value not in (1, -1):
        raise argparse.ArgumentTypeError("eps must be 1 or -1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="partnersym", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol_default=DEFAULT_RESIDUAL_TOL):
        p.add_argument("--points", type=int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=("auto", "exact", "float"), default="auto")
        p.add_argument("--tol", type=_positive, default=tol_default)
        p.add_argument("--out", help="write the report here instead of stdout")

    def potential_source(p, poly=True):
        p.add_argument("--potential", help="expression text")
        if poly:
            p.add_argument("--poly", help='polynomial family parameters, e.g. "g=1,D=1"')
            p.add_argument("--modes", help="JSON file with exponential modes")

    p = sub.add_parser("classify", help="canonical form of the general equation")
    p.add_argument("--coeffs", required=True, help='e.g. "a6=1,b1=1,b4=1"')
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("residual", help="equation residual of a potential at sample points")
    p.add_argument("--eq", required=True, choices=EQUATION_NAMES + ("general",))
    p.add_argument("--eps", type=_eps, default=1)
    p.add_argument("--coeffs")
    p.add_argument("--abc", help='asymmetric equation constants, e.g. "a=1,b=2,c=0"')
    p.add_argument("--potential", required=True)
    common(p)
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("recursion", help="specialised recursion; with --phi, verify the partner property")
    p.add_argument("--coeffs")
    p.add_argument("--eq", choices=EQUATION_NAMES + ("general",))
    p.add_argument("--eps", type=_eps, default=1)
    p.add_argument("--abc")
    p.add_argument("--omega0", help="numeric value; symbolic when omitted")
    p.add_argument("--potential")
    p.add_argument("--phi")
    common(p)
    p.set_defaults(func=cmd_recursion)

    p = sub.add_parser("lift-exp", help="exponential family: linear and legmix residuals")
    p.add_argument("--modes", required=True)
    common(p)
    p.set_defaults(func=cmd_lift_exp)

    p = sub.add_parser("lift-poly", help="polynomial family: linear and legmix residuals")
    p.add_argument("--poly", required=True)
    common(p)
    p.set_defaults(func=cmd_lift_poly)

    p = sub.add_parser("constraints", help="translation-invariance constraints on v(t,p,q,y)")
    potential_source(p)
    p.add_argument("--eps", type=_eps, default=1)
    p.add_argument("--lam", help="defaults to -eps")
    common(p)
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("legendre", help="Legendre transforms and the Husain bridge")
    p.add_argument("--transform", default="two-var-xz",
                   help="one of " + ", ".join(sorted(SPECS)) + " (append -inverse for the inverse)")
    p.add_argument("--bridge", action="store_true", help="check Husain -> mixed heavenly on --potential")
    p.add_argument("--potential", required=True)
    p.add_argument("--show", type=int, default=3, help="number of samples echoed in the report")
    common(p)
    p.set_defaults(func=cmd_legendre)

    for name, func, helptext in (("ricci", cmd_ricci, "Ricci-flatness scan"),
                                 ("grid", cmd_grid, "per-point curvature table")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--family", required=True, choices=FAMILIES)
        p.add_argument("--eps", type=_eps, default=1)
        potential_source(p)
        p.add_argument("--allow-nonsolution", action="store_true",
                       help="skip the governing-equation check (negative controls)")
        if name == "grid":
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        common(p, tol_default=None)
        p.set_defaults(func=func)
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    if getattr(args, "points", 1) is not None and getattr(args, "points", 1) < 1:
        print(json.dumps({"error": "--points must be at least 1"}), file=sys.stderr)
        return EXIT_USAGE
    try:
        report, code = args.func(args)
    except (PreconditionError, LegendreError, GeometryError, SingularMatrixError, IntegrationError,
            ZeroDivisionError) as exc:
        report, code = {"error": str(exc), "kind": type(exc).__name__, "pass": False}, EXIT_FAIL
    except (UsageError, ParseError, ChartError, NotLinearError, ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc), "kind": type(exc).__name__}), file=sys.stderr)
        return EXIT_USAGE
    text = report if isinstance(report, str) else json.dumps(report, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
