"""The general second-order equation with partner symmetries and its canonical forms."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from typing import Optional, Union

from .exprcore import TPQY, TPYZ, TXYZ, Chart, Expression, Point, get_chart, jet
from .exprcore.charts import require_same_chart
from .exprcore.scalars import ZERO, Scalar, scalar
from .jetalg import JetPoly

Coef = Union[Scalar, JetPoly]

COEFFICIENT_NAMES = ("a1", "a2", "a3", "a4", "a5", "a6",
                     "b0", "b1", "b2", "b3", "b4", "b5", "b6", "b7")


@dataclass(frozen=True)
class PdeCoefficients:
    """Constants of the general equation; ``b6`` enters as ``2*b6*u_tx``.

    Entries may also be symbolic parameters (:meth:`JetPoly.param`).
    """

    a1: Coef = ZERO
    a2: Coef = ZERO
    a3: Coef = ZERO
    a4: Coef = ZERO
    a5: Coef = ZERO
    a6: Coef = ZERO
    b0: Coef = ZERO
    b1: Coef = ZERO
    b2: Coef = ZERO
    b3: Coef = ZERO
    b4: Coef = ZERO
    b5: Coef = ZERO
    b6: Coef = ZERO
    b7: Coef = ZERO

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, JetPoly):
                object.__setattr__(self, f.name, scalar(value))

    @classmethod
    def parse(cls, text: str) -> PdeCoefficients:
        """``"a1=1,a6=1,b0=-1"``; omitted coefficients are zero."""
        values = {}
        for item in filter(None, (s.strip() for s in text.split(","))):
            name, sep, value = item.partition("=")
            name = name.strip()
            if not sep or name not in COEFFICIENT_NAMES:
                raise ValueError(f"bad coefficient assignment {item!r}")
            if name in values:
                raise ValueError(f"coefficient {name} given twice")
            values[name] = scalar(value.strip())
        return cls(**values)

    def as_dict(self) -> dict[str, Coef]:
        return {name: getattr(self, name) for name in COEFFICIENT_NAMES}

    def to_text(self) -> str:
        from .exprcore.scalars import format_scalar

        items = []
        for name, value in self.as_dict().items():
            if isinstance(value, JetPoly):
                items.append(f"{name}={value}")
            elif value != 0:
                items.append(f"{name}={format_scalar(value)}")
        return ",".join(items)

    @property
    def symbolic(self) -> bool:
        return any(isinstance(v, JetPoly) for v in self.as_dict().values())


def general_residual(c: PdeCoefficients, chart=TXYZ, dep: str = "u") -> JetPoly:
    """Left-hand side of the general equation as a jet polynomial.

    The first two chart variables play the roles of ``t`` and ``x``.
    """
    chart = get_chart(chart)
    t, x, y, z = chart.variables

    def u(a, b):
        return JetPoly.jet(dep, (a, b), chart)

    F = (c.a1 * (u(t, y) * u(x, z) - u(t, z) * u(x, y))
         + c.a2 * (u(t, x) * u(t, y) - u(t, t) * u(x, y))
         + c.a3 * (u(t, y) * u(x, x) - u(t, x) * u(x, y))
         + c.a4 * (u(t, x) * u(t, z) - u(t, t) * u(x, z))
         + c.a5 * (u(t, z) * u(x, x) - u(t, x) * u(x, z))
         + c.a6 * (u(t, t) * u(x, x) - u(t, x) ** 2)
         + c.b1 * u(x, y) + c.b2 * u(t, y) + c.b3 * u(x, z) + c.b4 * u(t, z)
         + c.b5 * u(t, t) + 2 * c.b6 * u(t, x) + c.b7 * u(x, x))
    return F + JetPoly.const(0, chart) + c.b0


class CanonicalCase(enum.Enum):
    FirstHeavenlyHomogeneous = "Ia1"
    FirstHeavenly = "Ia2"
    MixedHeavenly = "Ia3/Ib"
    SecondHeavenly = "IIa1"
    ThreeVariableReduction = "IIa2"
    LinearEquation = "IIb"
    AsymmetricHeavenly = "IIc"


@dataclass(frozen=True)
class Classification:
    case: CanonicalCase
    subcase: str
    note: str = ""

    def as_dict(self) -> dict:
        return {"case": self.case.name, "subcase": self.subcase, "note": self.note}


@dataclass(frozen=True)
class CaseIForm:
    """Case I equation already in the reduced presentation

    ``u_ty u_xz - u_tz u_xy + Gamma (u_tt u_xx - u_tx^2) + A u_tt + B u_xx + C u_tx
    + b1 u_xy + b2 u_ty + b3 u_xz + b4 u_tz + b0``.
    """

    Gamma: Scalar = ZERO
    A: Scalar = ZERO
    B: Scalar = ZERO
    C: Scalar = ZERO
    b1: Scalar = ZERO
    b2: Scalar = ZERO
    b3: Scalar = ZERO
    b4: Scalar = ZERO
    b0: Scalar = ZERO
    D: Optional[Scalar] = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                object.__setattr__(self, f.name, scalar(value))

    @classmethod
    def from_coefficients(cls, c: PdeCoefficients) -> CaseIForm:
        if c.a1 == 0 or any(getattr(c, n) != 0 for n in ("a2", "a3", "a4", "a5")):
            raise ValueError("reduced Case I form needs a1 != 0 and a2 = a3 = a4 = a5 = 0")
        k = 1 / c.a1
        return cls(Gamma=c.a6 * k, A=c.b5 * k, B=c.b7 * k, C=2 * c.b6 * k,
                   b1=c.b1 * k, b2=c.b2 * k, b3=c.b3 * k, b4=c.b4 * k, b0=c.b0 * k)

    def free_term(self) -> Scalar:
        """Constant ``D`` left after removing ``b1..b4`` by a quadratic shift of the unknown.

        With ``u = w + Q``, ``Q_tz = b1, Q_xy = b4, Q_ty = -b3, Q_xz = -b2`` (all other
        second derivatives of ``Q`` zero) the linear mixed terms cancel and the constant
        becomes ``b0 + b1 b4 - b2 b3``.  Only meaningful when ``Gamma = 0``.
        """
        if self.D is not None:
            return self.D
        return self.b0 + self.b1 * self.b4 - self.b2 * self.b3

    def residual(self, chart=TXYZ, dep: str = "u") -> JetPoly:
        c = PdeCoefficients(a1=1, a6=self.Gamma, b5=self.A, b7=self.B, b6=self.C / 2,
                            b1=self.b1, b2=self.b2, b3=self.b3, b4=self.b4, b0=self.b0)
        return general_residual(c, chart, dep)


def _classify_case_one(form: CaseIForm) -> Classification:
    if form.Gamma != 0:
        return Classification(CanonicalCase.MixedHeavenly, "Ib",
                              "transformable to the mixed heavenly equation; sign of eps not determined")
    D = form.free_term()
    if form.A == 0 and form.B == 0 and form.C == 0:
        if D == 0:
            return Classification(CanonicalCase.FirstHeavenlyHomogeneous, "Ia1")
        return Classification(CanonicalCase.FirstHeavenly, "Ia2", f"free term D = {D}, scaled to -1")
    return Classification(CanonicalCase.MixedHeavenly, "Ia3",
                          "reduction to the mixed heavenly equation uses Legendre and point "
                          "transformations; sign of eps not determined")


def classify(c: Union[PdeCoefficients, CaseIForm]) -> Classification:
    """Canonical form of the general equation, by the literal case predicates."""
    if isinstance(c, CaseIForm):
        return _classify_case_one(c)
    if c.symbolic:
        raise TypeError("classification needs numeric coefficients")
    a_mid = (c.a2, c.a3, c.a4, c.a5)
    if c.a1 != 0:
        if any(a != 0 for a in a_mid):
            return Classification(CanonicalCase.MixedHeavenly, "I",
                                  "a1 != 0 with a2..a5 not all zero: normalizing transformation "
                                  "unpublished; mixed heavenly family assumed")
        return _classify_case_one(CaseIForm.from_coefficients(c))
    if any(a != 0 for a in a_mid):
        return Classification(CanonicalCase.AsymmetricHeavenly, "IIc")
    if c.a6 != 0:
        if c.b1 * c.b4 - c.b2 * c.b3 != 0:
            return Classification(CanonicalCase.SecondHeavenly, "IIa1")
        return Classification(CanonicalCase.ThreeVariableReduction, "IIa2",
                              "b1 b4 - b2 b3 = 0: a combination of y and z drops out")
    return Classification(CanonicalCase.LinearEquation, "IIb")


# -- named canonical equations -------------------------------------------------


@dataclass(frozen=True)
class NamedEquation:
    name: str
    case: Optional[CanonicalCase]
    eps: Scalar
    residual: JetPoly
    chart: Chart
    dep: str = "u"
    coefficients: Optional[PdeCoefficients] = field(default=None, compare=False)

    def residual_at(self, u: Expression, pt: Point) -> Scalar:
        return residual_at(self, u, pt)


EQUATION_NAMES = ("first-homogeneous", "first", "mixed", "husain", "husain-chiral",
                  "second", "linear", "asymmetric", "legmix")


def named_equation(name: str, eps=1, coefficients: Optional[PdeCoefficients] = None,
                   a=1, b=0, c=0) -> NamedEquation:
    """Build one of the canonical equations.

    ``husain`` is the metric-section convention ``L_tt + eps L_pp + L_tz L_py - L_ty L_pz``;
    ``husain-chiral`` is ``v_ty v_pz - v_tz v_py + v_tt + eps v_pp`` (the direct
    specialisation of the general equation).  ``linear`` takes ``coefficients``
    (its a-entries must vanish); ``asymmetric`` takes ``a``, ``b``, ``c``.
    """
    eps = scalar(eps) if not isinstance(eps, JetPoly) else eps
    if name == "first-homogeneous":
        co = PdeCoefficients(a1=1)
        return NamedEquation(name, CanonicalCase.FirstHeavenlyHomogeneous, ZERO,
                             general_residual(co), TXYZ, "u", co)
    if name == "first":
        co = PdeCoefficients(a1=1, b0=-1)
        return NamedEquation(name, CanonicalCase.FirstHeavenly, ZERO, general_residual(co), TXYZ, "u", co)
    if name == "mixed":
        co = PdeCoefficients(a1=1, a6=1, b0=-eps)
        return NamedEquation(name, CanonicalCase.MixedHeavenly, eps, general_residual(co), TXYZ, "u", co)
    if name == "husain":
        co = PdeCoefficients(a1=-1, b5=1, b7=eps)
        return NamedEquation(name, CanonicalCase.MixedHeavenly, eps,
                             general_residual(co, TPYZ, "v"), TPYZ, "v", co)
    if name == "husain-chiral":
        co = PdeCoefficients(a1=1, b5=1, b7=eps)
        return NamedEquation(name, CanonicalCase.MixedHeavenly, eps,
                             general_residual(co, TPYZ, "v"), TPYZ, "v", co)
    if name == "second":
        co = PdeCoefficients(a6=1, b1=1, b4=1)
        return NamedEquation(name, CanonicalCase.SecondHeavenly, ZERO, general_residual(co), TXYZ, "u", co)
    if name == "linear":
        co = coefficients or PdeCoefficients()
        if any(getattr(co, n) != 0 for n in ("a1", "a2", "a3", "a4", "a5", "a6")):
            raise ValueError("the linear equation has all a-coefficients zero")
        return NamedEquation(name, CanonicalCase.LinearEquation, ZERO, general_residual(co), TXYZ, "u", co)
    if name == "asymmetric":
        co = PdeCoefficients(a2=1, b4=a, b3=b, b7=c)
        return NamedEquation(name, CanonicalCase.AsymmetricHeavenly, ZERO, general_residual(co), TXYZ, "u", co)
    if name == "legmix":
        return NamedEquation(name, None, eps, legmix_residual(eps), TPQY, "v", None)
    raise ValueError(f"unknown equation {name!r}; known: {', '.join(EQUATION_NAMES)}")


def legmix_residual(eps=1, dep: str = "v") -> JetPoly:
    """Legendre-transformed mixed heavenly equation over ``(t, p, q, y)``."""

    def v(names):
        return JetPoly.jet(dep, names, TPQY)

    return (v("tq") * v("py") - v("pq") * v("ty") + v("tt") * v("qq") - v("tq") ** 2
            + eps * (v("pp") * v("qq") - v("pq") ** 2))


def residual_at(eq: NamedEquation, u: Expression, pt: Point) -> Scalar:
    """Value of the equation's left-hand side on ``u`` at ``pt`` (exact for exact inputs)."""
    require_same_chart(u.chart, eq.chart)
    require_same_chart(pt.chart, eq.chart)
    return eq.residual.evaluate({eq.dep: jet(u, pt, 2)})
