"""Partial Legendre transformations: exact on quadratics, jet-based in general.

Every transformation here has the shape

    P_i = sigma_i * u_{w_i},    v = u - sum_i w_i u_{w_i},    w_i = -sigma_i v_{P_i},

for a few active variables ``w_i`` (the remaining, passive, variables keep
their names).  The inverse has the charts swapped and ``sigma -> -sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .catalog import named_equation, residual_at
from .exprcore import RTY, STY, TPQY, TPYZ, TXYZ, Chart, Expression, JetTable, Point, jet
from .exprcore.charts import require_same_chart
from .exprcore.jets import MAX_JET_ORDER
from .exprcore.scalars import Scalar, is_exact, to_float
from .linalg import SingularMatrixError
from .taylor import Series, jet_from_series


class LegendreError(ValueError):
    """Degenerate transformation or failed inversion."""


class DegenerateTransformError(LegendreError):
    pass


class NonConvergenceError(LegendreError):
    pass


@dataclass(frozen=True)
class TransformSpec:
    kind: str
    source: Chart
    target: Chart
    pairs: tuple[tuple[str, str, int], ...]  # (old variable, new variable, sigma)

    @property
    def active(self) -> tuple[str, ...]:
        return tuple(w for w, _, _ in self.pairs)

    def new_name(self, var: str) -> str:
        for w, P, _ in self.pairs:
            if w == var:
                return P
        return var

    def old_name(self, var: str) -> str:
        for w, P, _ in self.pairs:
            if P == var:
                return w
        return var

    def inverse(self) -> TransformSpec:
        kind = self.kind[:-len("-inverse")] if self.kind.endswith("-inverse") else self.kind + "-inverse"
        return TransformSpec(kind, self.target, self.source,
                             tuple((P, w, -s) for w, P, s in self.pairs))


TWO_VAR_XZ = TransformSpec("two-var-xz", TXYZ, TPQY, (("x", "p", 1), ("z", "q", 1)))
ONE_VAR_S = TransformSpec("one-var-s", STY, RTY, (("s", "r", 1),))
# Husain potential Lambda(t, p, y, z) -> mixed heavenly potential u(t, x, y, z)
ONE_VAR_X_HUSAIN = TransformSpec("one-var-x-husain", TPYZ, TXYZ, (("p", "x", 1),))
# mixed heavenly u(t, x, y, z) -> v(t, p, y, z) obeying the chiral Husain form
ONE_VAR_P_HUSAIN_INVERSE = TransformSpec("one-var-p-husain-inverse", TXYZ, TPYZ, (("x", "p", 1),))

SPECS = {s.kind: s for s in (TWO_VAR_XZ, ONE_VAR_S, ONE_VAR_X_HUSAIN, ONE_VAR_P_HUSAIN_INVERSE)}


def get_spec(kind) -> TransformSpec:
    if isinstance(kind, TransformSpec):
        return kind
    if kind.endswith("-inverse") and kind not in SPECS:
        return get_spec(kind[:-len("-inverse")]).inverse()
    try:
        return SPECS[kind]
    except KeyError:
        raise ValueError(f"unknown transform {kind!r}; known: {', '.join(sorted(SPECS))}") from None


@dataclass(frozen=True)
class NumericInversionConfig:
    tolerance: float = 1e-12
    max_iterations: int = 50
    initial_guess: str = "quadratic-origin"  # or "zero"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.initial_guess not in ("quadratic-origin", "zero"):
            raise ValueError(f"unknown initial guess strategy {self.initial_guess!r}")


# -- quadratic potentials ----------------------------------------------------


def _quadratic_data(u: Expression):
    """Gradient and Hessian of a polynomial of degree <= 2 at the chart origin."""
    if not u.is_polynomial() or u.degree() > 2:
        raise ValueError("legendre_quadratic needs a polynomial of degree at most 2")
    table = jet(u, Point.origin(u.chart), 2)
    n = u.chart.dim
    grad = [table.entries[tuple(1 if j == i else 0 for j in range(n))] for i in range(n)]
    hess = [[table.entries[tuple((j == a) + (j == b) for j in range(n))] for b in range(n)] for a in range(n)]
    return table.value, grad, hess


def legendre_quadratic(u: Expression, spec=TWO_VAR_XZ) -> Expression:
    """Exact transform of a quadratic potential."""
    spec = get_spec(spec)
    require_same_chart(u.chart, spec.source)
    _, grad, hess = _quadratic_data(u)
    src, tgt = spec.source, spec.target
    act = [src.index(w) for w in spec.active]
    pas = [i for i in range(src.dim) if i not in act]
    sig = [s for _, _, s in spec.pairs]
    block = [[hess[i][j] for j in act] for i in act]
    try:
        inv = linalg.inverse(block)
    except SingularMatrixError:
        raise DegenerateTransformError(f"Hessian block in {spec.active} is singular") from None
    P = [Expression.variable(tgt, Pn) for _, Pn, _ in spec.pairs]
    passive = {i: Expression.variable(tgt, src.variables[i]) for i in pas}
    # sigma_i P_i - (H_wa a)_i - g_i, then w = H_ww^{-1} of that
    rhs = []
    for k, i in enumerate(act):
        e = P[k] * sig[k] - grad[i]
        for j in pas:
            e = e - passive[j] * hess[i][j]
        rhs.append(e)
    w_img = [sum((rhs[c] * inv[r][c] for c in range(len(act))), Expression(tgt)) for r in range(len(act))]
    images = {src.variables[i]: w_img[k] for k, i in enumerate(act)}
    images.update({src.variables[i]: passive[i] for i in pas})
    v = u.substitute(tgt, images)
    for k in range(len(act)):
        v = v - w_img[k] * P[k] * sig[k]
    return v


# -- jets of the transformed potential --------------------------------------


@dataclass(frozen=True)
class LegendreJet:
    point: Point  # point in the target chart
    table: JetTable  # jets of the transformed potential there

    @property
    def value(self) -> Scalar:
        return self.table.value


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def legendre_jet(table: JetTable, spec=TWO_VAR_XZ, order: Optional[int] = None) -> LegendreJet:
    """Transform a jet of the source potential into a jet of the new potential.

    Output order equals the input order by default; results are exact when the
    input entries are.
    """
    spec = get_spec(spec)
    require_same_chart(table.chart, spec.source)
    K = table.order if order is None else order
    if K > table.order or K < 1:
        raise ValueError(f"cannot produce order {K} from a jet of order {table.order}")
    if table.order < 2:
        raise ValueError("the source jet must reach order 2 to invert the Hessian block")
    src, tgt = spec.source, spec.target
    n = src.dim
    act = [src.index(w) for w, _, _ in spec.pairs]
    sig = [s for _, _, s in spec.pairs]
    pt = table.point
    grad = [table.entries[_unit(n, i)] for i in range(n)]

    # the mapped point
    coords = []
    for var in tgt.variables:
        old = spec.old_name(var)
        k = next((k for k, (_, Pn, _) in enumerate(spec.pairs) if Pn == var), None)
        coords.append(sig[k] * grad[act[k]] if k is not None else pt[old])
    new_pt = Point(tgt, tuple(coords))
    value = table.value - sum((pt[src.variables[i]] * grad[i] for i in act), Fraction(0))

    if K == 0:  # pragma: no cover - guarded above
        return LegendreJet(new_pt, JetTable(tgt, new_pt, 0, {(0,) * n: value}))

    block = [[table.entries[tuple((j == a) + (j == b) for j in range(n))] for b in act] for a in act]
    try:
        inv = linalg.inverse(block)
    except SingularMatrixError:
        raise DegenerateTransformError(
            f"Hessian block in {spec.active} is singular at {pt.as_dict()}") from None

    m = K - 1  # series order of first derivatives
    tvars = [Series.variable(n, m, j) for j in range(n)]
    # displacement of each source variable as a series in the target displacement
    disp: list[Optional[Series]] = [None] * n
    for i in range(n):
        if i not in act:
            disp[i] = tvars[tgt.index(src.variables[i])]
    dP = [tvars[tgt.index(Pn)] for _, Pn, _ in spec.pairs]
    grad_series = [Series.from_jet(table, _unit(n, i), m) for i in act]
    grad_shift = [g - g.value for g in grad_series]

    dw = [Series(n, m) for _ in act]
    for _ in range(m + 1):
        for k, i in enumerate(act):
            disp[i] = dw[k]
        resid = [(grad_shift[k].compose(disp) * sig[k]) - dP[k] for k in range(len(act))]
        dw = [dw[r] - sum((resid[c] * (inv[r][c] * sig[c]) for c in range(len(act))), Series(n, m))
              for r in range(len(act))]
    for k, i in enumerate(act):
        disp[i] = dw[k]

    first = []
    for j, var in enumerate(tgt.variables):
        k = next((k for k, (_, Pn, _) in enumerate(spec.pairs) if Pn == var), None)
        if k is not None:
            w0 = pt[src.variables[act[k]]]
            first.append((dw[k] + w0) * (-sig[k]))
        else:
            i = src.index(spec.old_name(var))
            first.append(Series.from_jet(table, _unit(n, i), m).compose(disp))
    entries = jet_from_series(first, K)
    entries[(0,) * n] = value
    return LegendreJet(new_pt, JetTable(tgt, new_pt, K, entries))


def legendre_numeric(u: Expression, pt: Point, spec=TWO_VAR_XZ, cfg: Optional[NumericInversionConfig] = None,
                     order: int = MAX_JET_ORDER) -> LegendreJet:
    """Mapped point and jets of the transformed potential, from the explicit source potential."""
    spec = get_spec(spec)
    cfg = cfg or NumericInversionConfig()
    require_same_chart(u.chart, spec.source)
    result = legendre_jet(jet(u, pt, max(order, 2)), spec, order)
    check_first_jets(result, pt, spec, cfg.tolerance)
    return result


def check_first_jets(result: LegendreJet, source_pt: Point, spec: TransformSpec, tol: float) -> Scalar:
    """Largest violation of ``w_i = -sigma_i v_{P_i}``; raises if above ``tol``."""
    worst: Scalar = Fraction(0)
    for w, P, s in spec.pairs:
        err = source_pt[w] + s * result.table[(P,)]
        if abs(err) > abs(worst):
            worst = err
    if abs(worst) > tol:
        raise LegendreError(f"first-order jet identities violated by {worst}")
    return worst


def legendre_solve(u: Expression, target_pt: Point, spec=TWO_VAR_XZ,
                   cfg: Optional[NumericInversionConfig] = None) -> Point:
    """Source point whose image under the transform is ``target_pt`` (Newton iteration)."""
    spec = get_spec(spec)
    cfg = cfg or NumericInversionConfig()
    require_same_chart(u.chart, spec.source)
    require_same_chart(target_pt.chart, spec.target)
    src = spec.source
    n = src.dim
    act = [src.index(w) for w in spec.active]
    sig = [s for _, _, s in spec.pairs]
    goal = [target_pt[P] for _, P, _ in spec.pairs]
    coords: list[Scalar] = [Fraction(0)] * n
    for i in range(n):
        if i not in act:
            coords[i] = target_pt[src.variables[i]]
    grads = [u.diff(src.variables[i]) for i in act]
    hess = [[g.diff(src.variables[j]) for j in act] for g in grads]

    if cfg.initial_guess == "quadratic-origin":
        base = jet(u, Point.origin(src), 2)
        block = [[base.entries[tuple((j == a) + (j == b) for j in range(n))] for b in act] for a in act]
        rhs = []
        for k, i in enumerate(act):
            val = sig[k] * goal[k] - base.entries[_unit(n, i)]
            for j in range(n):
                if j not in act:
                    val -= base.entries[tuple((m == i) + (m == j) for m in range(n))] * coords[j]
            rhs.append(val)
        try:
            guess = linalg.solve(block, rhs)
            for k, i in enumerate(act):
                coords[i] = guess[k]
        except SingularMatrixError:
            pass

    def residual(cs):
        p = Point(src, tuple(cs))
        return [sig[k] * grads[k].evaluate(p) - goal[k] for k in range(len(act))], p

    res, p = residual(coords)
    if all(r == 0 for r in res):
        return p
    coords = [to_float(c) for c in coords]
    for _ in range(cfg.max_iterations):
        res, p = residual(coords)
        if max(abs(r) for r in res) <= cfg.tolerance:
            return p
        J = [[sig[k] * to_float(hess[k][c].evaluate(p)) for c in range(len(act))] for k in range(len(act))]
        try:
            step = linalg.solve(J, [to_float(r) for r in res])
        except SingularMatrixError:
            raise DegenerateTransformError(f"singular Jacobian at {p.as_dict()}") from None
        for k, i in enumerate(act):
            coords[i] -= step[k]
    res, p = residual(coords)
    if max(abs(r) for r in res) <= cfg.tolerance:
        return p
    raise NonConvergenceError(f"Newton iteration did not converge; residual {max(abs(r) for r in res)}")


# -- Husain and mixed heavenly -----------------------------------------------


@dataclass
class BridgeReport:
    points: int
    max_husain_residual: Scalar
    max_mixed_residual: Scalar
    exact: bool
    tolerance: float
    samples: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        if self.exact:
            return self.max_husain_residual == 0 and self.max_mixed_residual == 0
        return abs(self.max_husain_residual) <= self.tolerance and abs(self.max_mixed_residual) <= self.tolerance

    def as_dict(self) -> dict:
        from .exprcore.scalars import format_scalar

        return {"points": self.points, "max_husain_residual": format_scalar(self.max_husain_residual),
                "max_mixed_residual": format_scalar(self.max_mixed_residual),
                "exact": self.exact, "pass": self.passed}


def husain_mixed_bridge(lam: Expression, pts: Sequence[Point], tolerance: float = 1e-9) -> BridgeReport:
    """Check that a Husain solution becomes a mixed heavenly (eps = 1) solution at each point."""
    require_same_chart(lam.chart, TPYZ)
    lam_pp = lam.diff("p").diff("p")
    if lam_pp.is_zero():
        raise DegenerateTransformError("Lambda is at most linear in p; the Legendre transform is degenerate")
    husain = named_equation("husain", 1)
    mixed = named_equation("mixed", 1)
    worst_h: Scalar = Fraction(0)
    worst_m: Scalar = Fraction(0)
    exact = lam.exact and all(p.exact for p in pts)
    samples = []
    for pt in pts:
        rh = residual_at(husain, lam, pt)
        result = legendre_jet(jet(lam, pt, 2), ONE_VAR_X_HUSAIN)
        rm = mixed.residual.evaluate({"u": result.table})
        samples.append((pt, result.point, rh, rm))
        worst_h = rh if abs(rh) > abs(worst_h) else worst_h
        worst_m = rm if abs(rm) > abs(worst_m) else worst_m
    exact = exact and is_exact(worst_h) and is_exact(worst_m)
    return BridgeReport(len(pts), worst_h, worst_m, exact, tolerance, samples)
