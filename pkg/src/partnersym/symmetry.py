"""Recursions between partner symmetries and their verification on explicit solutions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .catalog import NamedEquation, PdeCoefficients, residual_at
from .exprcore import TXYZ, Expression, Point, get_chart, jet
from .exprcore.charts import require_same_chart
from .exprcore.expression import IntegrationError
from .exprcore.scalars import ZERO, Scalar
from .jetalg import JetPoly, frechet

DEFAULT_TOLERANCE = 1e-9


class PreconditionError(ValueError):
    """``u`` is not a solution or ``phi`` is not a symmetry at the sample points."""


@dataclass(frozen=True)
class Recursion:
    """``psi_t = sum_i psi_t_coeffs[i] * phi_i`` and ``psi_x = ...`` over ``(phi_t, phi_x, phi_y, phi_z)``."""

    omega0: object
    psi_t_coeffs: tuple[JetPoly, JetPoly, JetPoly, JetPoly]
    psi_x_coeffs: tuple[JetPoly, JetPoly, JetPoly, JetPoly]
    chart: object = TXYZ
    dep: str = "u"

    def _combine(self, coeffs, var: str) -> JetPoly:
        out = JetPoly(self.chart)
        for c, v in zip(coeffs, get_chart(self.chart).variables):
            out = out + c * JetPoly.jet(var, (v,), self.chart)
        return out

    def psi_t(self, var: str = "phi") -> JetPoly:
        return self._combine(self.psi_t_coeffs, var)

    def psi_x(self, var: str = "phi") -> JetPoly:
        return self._combine(self.psi_x_coeffs, var)

    def to_text(self) -> str:
        chart = get_chart(self.chart)
        t, x = chart.variables[:2]
        return f"psi_{t} = {self.psi_t()}\npsi_{x} = {self.psi_x()}"


def build_recursion(c: PdeCoefficients, omega0=ZERO, chart=TXYZ, dep: str = "u") -> Recursion:
    """Coefficient pattern of the recursion for the general equation.

    ``omega0`` may be a number or a symbolic parameter (``JetPoly.param("omega0")``).
    """
    chart = get_chart(chart)
    t, x, y, z = chart.variables

    def u(a, b):
        return JetPoly.jet(dep, (a, b), chart)

    w = omega0 if isinstance(omega0, JetPoly) else JetPoly.const(omega0, chart)
    psi_t = (
        -(c.a2 * u(t, y) + c.a4 * u(t, z) - c.a6 * u(t, x) + c.b6 - w),
        -(c.a3 * u(t, y) + c.a5 * u(t, z) + c.a6 * u(t, t) + c.b7),
        c.a1 * u(t, z) + c.a2 * u(t, t) + c.a3 * u(t, x) - c.b1,
        -c.a1 * u(t, y) + c.a4 * u(t, t) + c.a5 * u(t, x) - c.b3,
    )
    psi_x = (
        -(c.a2 * u(x, y) + c.a4 * u(x, z) - c.a6 * u(x, x) - c.b5),
        -(c.a3 * u(x, y) + c.a5 * u(x, z) + c.a6 * u(t, x) - c.b6 - w),
        c.a1 * u(x, z) + c.a2 * u(t, x) + c.a3 * u(x, x) + c.b2,
        -c.a1 * u(x, y) + c.a4 * u(t, x) + c.a5 * u(x, x) + c.b4,
    )
    zero = JetPoly(chart)
    psi_t = tuple(zero + e for e in psi_t)
    psi_x = tuple(zero + e for e in psi_x)
    return Recursion(omega0, psi_t, psi_x, chart, dep)


def apply_recursion(r: Recursion, u: Expression, phi: Expression) -> tuple[Expression, Expression]:
    """Explicit ``(psi_t, psi_x)`` generated from the symmetry ``phi`` on the solution ``u``."""
    require_same_chart(u.chart, get_chart(r.chart))
    require_same_chart(phi.chart, u.chart)
    fields = {r.dep: u, "phi": phi}
    return r.psi_t().to_expression(fields), r.psi_x().to_expression(fields)


def integrability_defect(psi_t: Expression, psi_x: Expression) -> Expression:
    """``d/dx psi_t - d/dt psi_x``; identically zero iff the potential exists."""
    require_same_chart(psi_t.chart, psi_x.chart)
    t, x = psi_t.chart.variables[:2]
    return psi_t.diff(x) - psi_x.diff(t)


def integrate_potential(psi_t: Expression, psi_x: Expression) -> Expression:
    """The potential with the given t- and x-derivatives, vanishing on ``t = x = 0``."""
    defect = integrability_defect(psi_t, psi_x)
    if not defect.is_zero():
        raise IntegrationError(f"pair is not integrable; defect = {defect}")
    t, x = psi_t.chart.variables[:2]
    first = psi_t.integrate(t)
    rest = psi_x - first.diff(x)
    if rest.depends_on(t):
        raise IntegrationError("remainder still depends on t")  # pragma: no cover - guarded by the defect
    psi = first + rest.integrate(x)
    return psi - psi.restrict({t: 0, x: 0})


@dataclass
class SymmetryCheckReport:
    defect: Expression
    psi: Optional[Expression]
    max_symmetry_residual: Optional[Scalar]
    points: int
    exact: bool
    tolerance: float

    @property
    def integrable(self) -> bool:
        return self.defect.is_zero()

    @property
    def passed(self) -> bool:
        if not self.integrable or self.max_symmetry_residual is None:
            return False
        if self.exact:
            return self.max_symmetry_residual == 0
        return abs(self.max_symmetry_residual) <= self.tolerance

    def as_dict(self) -> dict:
        from .exprcore.scalars import format_scalar

        res = self.max_symmetry_residual
        return {
            "defect": str(self.defect),
            "integrable": self.integrable,
            "psi": None if self.psi is None else str(self.psi),
            "max_symmetry_residual": None if res is None else format_scalar(res),
            "points": self.points,
            "exact": self.exact,
            "pass": self.passed,
        }


def symmetry_residual(eq: NamedEquation, u: Expression, phi: Expression, pt: Point) -> Scalar:
    """The linearised equation on ``u`` applied to ``phi`` at ``pt``."""
    lin = frechet(eq.residual, eq.dep, "phi")
    return lin.evaluate({eq.dep: jet(u, pt, 2), "phi": jet(phi, pt, 2)})


def verify_partner(eq: NamedEquation, u: Expression, phi: Expression, r: Recursion,
                   pts: Sequence[Point], tolerance: float = DEFAULT_TOLERANCE) -> SymmetryCheckReport:
    """Check that the potential generated from ``phi`` is again a symmetry on ``u``."""
    exact = u.exact and phi.exact and all(p.exact for p in pts) and is_exact_poly(eq.residual)

    def small(value) -> bool:
        return value == 0 if exact else abs(value) <= tolerance

    for pt in pts:
        res = residual_at(eq, u, pt)
        if not small(res):
            raise PreconditionError(f"u is not a solution at {pt.as_dict()}: residual {res}")
        sym = symmetry_residual(eq, u, phi, pt)
        if not small(sym):
            raise PreconditionError(f"phi is not a symmetry at {pt.as_dict()}: residual {sym}")
    psi_t, psi_x = apply_recursion(r, u, phi)
    defect = integrability_defect(psi_t, psi_x)
    if not defect.is_zero():
        return SymmetryCheckReport(defect, None, None, len(pts), exact, tolerance)
    psi = integrate_potential(psi_t, psi_x)
    worst: Scalar = ZERO
    for pt in pts:
        val = symmetry_residual(eq, u, psi, pt)
        if abs(val) > abs(worst):
            worst = val
    return SymmetryCheckReport(defect, psi, worst, len(pts), exact, tolerance)


def is_exact_poly(p: JetPoly) -> bool:
    return p.exact and not p.params()
