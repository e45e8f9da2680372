"""Metrics built from heavenly potentials and their curvature at a point.

Metric components are written once, generically over the number type, and
evaluated either on plain scalars (values only) or on second-order Taylor
series of the potential's second derivatives (values, gradients and Hessians
of every component).  Curvature then needs no differentiation beyond what the
series carry.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import linalg
from .catalog import named_equation
from .exprcore import TPQY, TPYZ, TXYZ, Chart, Expression, JetTable, Point, jet
from .exprcore.charts import require_same_chart
from .exprcore.scalars import Scalar, all_exact, format_scalar, scalar
from .linalg import SingularMatrixError
from .taylor import Series

FAMILIES = ("husain", "mixed", "mixedsym", "legmix")
FAMILY_CHARTS: dict[str, Chart] = {"husain": TPYZ, "mixed": TXYZ, "mixedsym": TXYZ, "legmix": TPQY}
DEFAULT_CURVATURE_TOL = 1e-6


class GeometryError(ValueError):
    pass


class ZeroDenominatorError(GeometryError):
    pass


class SingularMetricError(GeometryError):
    pass


class DegeneratePotentialError(GeometryError):
    pass


_HALF = Fraction(1, 2)

Taylor2Scalar = Series  # order-2 series: value, gradient and Hessian of a component


def _is_zero(x) -> bool:
    return getattr(x, "value", x) == 0


def _sym_product(a: Sequence, b: Sequence, coef) -> list[list]:
    """``coef * a (x) b`` symmetrised, as a matrix (a cross term splits evenly)."""
    n = len(a)
    return [[coef * (a[i] * b[j] + a[j] * b[i]) * _HALF for j in range(n)] for i in range(n)]


class _Form:
    """Accumulates a quadratic form from products of 1-forms."""

    def __init__(self, n: int, zero):
        self.n = n
        self.zero = zero
        self.g = [[zero for _ in range(n)] for _ in range(n)]

    def add(self, a, b, coef=1):
        p = _sym_product(a, b, coef)
        for i in range(self.n):
            for j in range(self.n):
                self.g[i][j] = self.g[i][j] + p[i][j]

    def basis(self, i):
        return [1 if j == i else 0 for j in range(self.n)]

    def scaled(self, k) -> list[list]:
        return [[k * x for x in row] for row in self.g]


def _check_denominator(name: str, value) -> None:
    if _is_zero(value):
        raise ZeroDenominatorError(f"{name} vanishes at this point")


def _metric(family: str, d: Callable[[str], object], eps, zero) -> tuple[list[list], dict]:
    """Components ``g_{mu nu}`` and the denominators used, from second derivatives ``d("ty")``."""
    F = _Form(4, zero)
    if family == "husain":  # (t, p, y, z)
        wt = [0, 0, d("ty"), d("tz")]
        wp = [0, 0, d("py"), d("pz")]
        delta = d("ty") * d("pz") - d("tz") * d("py")
        _check_denominator("Delta_tp", delta)
        F.add(wt, F.basis(0))
        F.add(wp, F.basis(1))
        inv = 1 / delta
        F.add(wt, wt, inv)
        F.add(wp, wp, inv)
        dens = {"Delta_tp": delta}
    elif family in ("mixed", "mixedsym"):  # (t, x, y, z)
        wt = [0, 0, d("ty"), d("tz")]
        wx = [0, 0, d("xy"), d("xz")]
        delta = d("tz") * d("xy") - d("ty") * d("xz")
        _check_denominator("Delta", delta)
        F.add(wt, F.basis(0))
        F.add(wx, F.basis(1))
        if family == "mixed":
            uxx, utx = d("xx"), d("tx")
            _check_denominator("u_xx", uxx)
            inv = 1 / (uxx * delta)
            comb = [uxx * a - utx * b for a, b in zip(wt, wx)]
            F.add(comb, comb, inv)
            F.add(wx, wx, (delta + 1) * inv)
            dens = {"Delta": delta, "u_xx": uxx}
        else:
            inv = 1 / delta
            F.add(wt, wt, d("xx") * inv)
            F.add(wt, wx, -2 * d("tx") * inv)
            F.add(wx, wx, d("tt") * inv)
            dens = {"Delta": delta}
    elif family == "legmix":  # (t, p, q, y)
        delta = d("ty") * d("pq") - d("tq") * d("py")
        _check_denominator("delta", delta)
        inv = 1 / delta
        theta = [d("tq"), d("pq"), d("qq"), 0]
        dq, dy = F.basis(2), F.basis(3)
        F.add(theta, theta, (d("tt") + eps * d("pp")) * inv)
        F.add(theta, dq, -1)
        F.add(theta, dy, 2 * (d("tq") * d("ty") + eps * d("pq") * d("py")) * inv)
        last = [d("ty"), d("py"), 0, d("qq") * (d("ty") ** 2 + eps * d("py") ** 2) * inv]
        F.add(last, dy)
        dens = {"delta": delta, "v_qq": d("qq")}
    else:
        raise ValueError(f"unknown metric family {family!r}; known: {', '.join(FAMILIES)}")
    return F.scaled(2), dens


def _check_table(family: str, table: JetTable, order: int) -> None:
    if family not in FAMILY_CHARTS:
        raise ValueError(f"unknown metric family {family!r}; known: {', '.join(FAMILIES)}")
    require_same_chart(table.chart, FAMILY_CHARTS[family])
    if table.order < order:
        raise GeometryError(f"family {family} needs a potential jet of order {order}, got {table.order}")


def metric_components(family: str, table: JetTable, eps=1) -> list[list[Scalar]]:
    """Symmetric 4x4 matrix of the line element at the jet's base point."""
    _check_table(family, table, 2)
    g, _ = _metric(family, lambda names: table[names], scalar(eps), Fraction(0))
    return [[scalar(x) if isinstance(x, int) else x for x in row] for row in g]


@dataclass
class MetricAtPoint:
    family: str
    chart: Chart
    point: Point
    eps: Scalar
    components: list[list[Series]]
    denominators: dict = field(default_factory=dict)

    def values(self) -> list[list[Scalar]]:
        return [[c.value for c in row] for row in self.components]

    @property
    def exact(self) -> bool:
        return all(c.exact for row in self.components for c in row)


def metric_taylor2(family: str, table: JetTable, eps=1) -> MetricAtPoint:
    """Metric components as second-order Taylor series around the base point."""
    _check_table(family, table, 4)
    n = table.chart.dim
    cache = {}

    def d(names):
        key = table.counts(names)
        if key not in cache:
            cache[key] = Series.from_jet(table, key, 2)
        return cache[key]

    g, dens = _metric(family, d, scalar(eps), Series(n, 2))
    comps = [[x if isinstance(x, Series) else Series.constant(n, 2, scalar(x)) for x in row] for row in g]
    for i in range(n):
        for j in range(i):
            if not _series_close(comps[i][j], comps[j][i]):
                raise GeometryError("metric components are not symmetric")  # pragma: no cover
    return MetricAtPoint(family, table.chart, table.point, scalar(eps), comps,
                         {k: getattr(v, "value", v) for k, v in dens.items()})


def _series_close(a: Series, b: Series) -> bool:
    keys = set(a.coeffs) | set(b.coeffs)
    return all(abs(a.coeffs.get(k, 0) - b.coeffs.get(k, 0)) <= 1e-12 * (1 + abs(a.coeffs.get(k, 0)))
               for k in keys)


# -- curvature ----------------------------------------------------------------


@dataclass
class CurvatureReport:
    family: str
    point: Point
    metric: list[list[Scalar]]
    christoffel: list  # [lam][mu][nu]
    riemann: list  # [rho][sigma][mu][nu]
    ricci: list[list[Scalar]]
    det: Scalar
    denominators: dict
    exact: bool

    @property
    def max_ricci(self) -> Scalar:
        return max(abs(x) for row in self.ricci for x in row)

    @property
    def max_riemann(self) -> Scalar:
        return max(abs(x) for a in self.riemann for b in a for c in b for x in c)

    @property
    def scale(self) -> Scalar:
        return max(self.max_riemann, 1)

    def ricci_flat(self, tol: float = DEFAULT_CURVATURE_TOL) -> bool:
        if self.exact:
            return self.max_ricci == 0
        return self.max_ricci <= tol * self.scale

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "point": {k: format_scalar(v) for k, v in self.point.as_dict().items()},
            "det_g": format_scalar(self.det),
            "max_ricci": format_scalar(self.max_ricci),
            "max_riemann": format_scalar(self.max_riemann),
            "denominators": {k: format_scalar(v) for k, v in self.denominators.items()},
            "exact": self.exact,
        }


def curvature(m: MetricAtPoint, check: bool = True) -> CurvatureReport:
    """Christoffel symbols, Riemann and Ricci tensors at the metric's base point."""
    n = len(m.components)
    g1 = [[c.truncate(1) for c in row] for row in m.components]
    g0 = [[c.value for c in row] for row in m.components]
    det = linalg.det(g0)
    if det == 0 or (not all_exact([det]) and abs(det) <= 1e-14):
        raise SingularMetricError(f"metric is degenerate at {m.point.as_dict()}")
    try:
        ginv = linalg.inverse(g1)
    except SingularMatrixError:
        raise SingularMetricError(f"metric is degenerate at {m.point.as_dict()}") from None
    dg = [[[m.components[a][b].diff(c) for c in range(n)] for b in range(n)] for a in range(n)]  # dg[a][b][c] = d_c g_ab

    # Gamma^l_{mu nu} as order-1 series
    gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
    for mu in range(n):
        for nu in range(mu, n):
            low = [(dg[r][nu][mu] + dg[r][mu][nu] - dg[mu][nu][r]) * _HALF for r in range(n)]
            for lam in range(n):
                s = Series(n, 1)
                for r in range(n):
                    s = s + ginv[lam][r] * low[r]
                gamma[lam][mu][nu] = gamma[lam][nu][mu] = s
    G = [[[gamma[a][b][c].value for c in range(n)] for b in range(n)] for a in range(n)]
    dG = [[[gamma[a][b][c].gradient for c in range(n)] for b in range(n)] for a in range(n)]  # dG[l][m][n][k]

    riemann = [[[[Fraction(0)] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for rho in range(n):
        for sig in range(n):
            for mu in range(n):
                for nu in range(n):
                    val = dG[rho][nu][sig][mu] - dG[rho][mu][sig][nu]
                    for lam in range(n):
                        val = val + G[rho][mu][lam] * G[lam][nu][sig] - G[rho][nu][lam] * G[lam][mu][sig]
                    riemann[rho][sig][mu][nu] = val
    ricci = [[sum((riemann[r][s][r][v] for r in range(n)), Fraction(0)) for v in range(n)] for s in range(n)]
    exact = m.exact
    report = CurvatureReport(m.family, m.point, g0, G, riemann, ricci, det, dict(m.denominators), exact)
    if check:
        check_index_symmetries(report)
    return report


def check_index_symmetries(r: CurvatureReport, rel: float = 1e-8) -> None:
    """Lower-index symmetry of Gamma, antisymmetry of Riemann, symmetry of Ricci."""
    tol = 0 if r.exact else rel * r.scale
    n = len(r.metric)
    for l in range(n):
        for a in range(n):
            for b in range(n):
                if abs(r.christoffel[l][a][b] - r.christoffel[l][b][a]) > tol:
                    raise GeometryError("Christoffel symbols not symmetric")  # pragma: no cover
    for p in range(n):
        for s in range(n):
            for a in range(n):
                for b in range(n):
                    if abs(r.riemann[p][s][a][b] + r.riemann[p][s][b][a]) > tol:
                        raise GeometryError("Riemann tensor not antisymmetric")  # pragma: no cover
    for a in range(n):
        for b in range(n):
            if abs(r.ricci[a][b] - r.ricci[b][a]) > tol:
                raise GeometryError("Ricci tensor not symmetric")


def curvature_from_jets(family: str, table: JetTable, eps=1) -> CurvatureReport:
    return curvature(metric_taylor2(family, table, eps))


# -- scans --------------------------------------------------------------------


GOVERNING = {"husain": ("husain", None), "mixed": ("mixed", 1), "mixedsym": ("mixed", None),
             "legmix": ("legmix", None)}


def governing_equation(family: str, eps=1):
    name, fixed = GOVERNING[family]
    if name == "husain":
        return named_equation("husain", 1)
    return named_equation(name, eps if fixed is None else fixed)


def random_point(chart: Chart, rng: random.Random, exact: bool, radius: float = 1.0) -> Point:
    if exact:
        return Point(chart, tuple(Fraction(rng.randint(-12, 12), rng.randint(1, 7)) for _ in chart.variables))
    return Point(chart, tuple(rng.uniform(-radius, radius) for _ in chart.variables))


@dataclass
class ScanSample:
    point: Point
    metric: list[list[Scalar]]
    max_ricci: Scalar
    scale: Scalar
    det: Scalar
    denominators: dict
    equation_residual: Scalar


@dataclass
class ScanReport:
    family: str
    eps: Scalar
    exact: bool
    tolerance: float
    samples: list[ScanSample]
    resampled: int = 0

    @property
    def npoints(self) -> int:
        return len(self.samples)

    @property
    def max_ricci(self) -> Scalar:
        return max((s.max_ricci for s in self.samples), default=Fraction(0))

    @property
    def passed(self) -> bool:
        if self.exact:
            return all(s.max_ricci == 0 for s in self.samples)
        return all(s.max_ricci <= self.tolerance * s.scale for s in self.samples)

    def as_dict(self) -> dict:
        return {"family": self.family, "eps": format_scalar(self.eps), "npoints": self.npoints,
                "mode": "exact" if self.exact else "float", "resampled": self.resampled,
                "max_ricci": format_scalar(self.max_ricci), "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    def to_csv(self) -> str:
        """One row per sample: coordinates, upper-triangle metric, max |Ricci|, det g, denominators."""
        if not self.samples:
            return ""
        chart = self.samples[0].point.chart
        n = chart.dim
        dens = list(self.samples[0].denominators)
        header = list(chart.variables)
        header += [f"g_{chart.variables[i]}{chart.variables[j]}" for i in range(n) for j in range(i, n)]
        header += ["max_ricci", "det_g"] + dens
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for s in self.samples:
            row = [format_scalar(c) for c in s.point.coords]
            row += [format_scalar(s.metric[i][j]) for i in range(n) for j in range(i, n)]
            row += [format_scalar(s.max_ricci), format_scalar(s.det)]
            row += [format_scalar(s.denominators[k]) for k in dens]
            w.writerow(row)
        return buf.getvalue()


def ricci_flat_scan(family: str, potential: Expression, eps=1, npoints: int = 20, seed: int = 0,
                    exact: Optional[bool] = None, tolerance: float = DEFAULT_CURVATURE_TOL,
                    residual_tol: float = 1e-9, require_solution: bool = True,
                    max_resamples: Optional[int] = None, radius: float = 1.0) -> ScanReport:
    """Curvature at seeded random points; points with vanishing denominators are redrawn."""
    chart = FAMILY_CHARTS.get(family)
    if chart is None:
        raise ValueError(f"unknown metric family {family!r}; known: {', '.join(FAMILIES)}")
    require_same_chart(potential.chart, chart)
    eps = scalar(eps)
    exact_ok = potential.exact and potential.is_polynomial()
    if exact is None:
        exact = exact_ok
    if exact and not exact_ok:
        raise ValueError("exact mode needs a polynomial potential with rational coefficients")
    eq = governing_equation(family, eps)
    rng = random.Random(seed)
    max_resamples = 10 * npoints + 10 if max_resamples is None else max_resamples
    samples: list[ScanSample] = []
    resampled = 0
    while len(samples) < npoints:
        pt = random_point(chart, rng, exact, radius)
        table = jet(potential, pt, 4)
        res = eq.residual.evaluate({eq.dep: table})
        if require_solution and (res != 0 if exact else abs(res) > residual_tol):
            from .symmetry import PreconditionError

            raise PreconditionError(f"potential does not solve the {eq.name} equation at "
                                    f"{pt.as_dict()}: residual {res}")
        try:
            rep = curvature(metric_taylor2(family, table, eps))
        except (ZeroDenominatorError, SingularMetricError):
            resampled += 1
            if resampled > max_resamples:
                raise DegeneratePotentialError(
                    f"more than {max_resamples} sample points hit a vanishing denominator") from None
            continue
        samples.append(ScanSample(pt, rep.metric, rep.max_ricci, rep.scale, rep.det, rep.denominators, res))
    return ScanReport(family, eps, exact, tolerance, samples, resampled)
