"""Lift from invariant to noninvariant solutions of the mixed heavenly equation.

Reduced equations, the constraints imposed by the partner-symmetry invariance
condition, the three constant-coefficient linear equations in the variables
``eta = p + t``, ``xi = p - t`` and the exponential and polynomial solution
families built from them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .exprcore import (ETA_XI, RTY, STY, TPQY, TXYZ, Expression, LinearMap, Point, jet,
                       get_chart)
from .exprcore.charts import require_same_chart
from .exprcore.scalars import Scalar, exact_sqrt, scalar
from .jetalg import JetPoly

# (eta, xi, q, y) written over (t, p, q, y)
TO_TPQY = LinearMap(ETA_XI, TPQY, {"eta": "p + t", "xi": "p - t", "q": "q", "y": "y"})


def to_tpqy(v: Expression) -> Expression:
    """Rewrite a function of ``(eta, xi, q, y)`` in ``(t, p, q, y)``."""
    return TO_TPQY(v)


def _var(name: str) -> Expression:
    return Expression.variable(ETA_XI, name)


# -- exponential family --------------------------------------------------------


@dataclass(frozen=True)
class ExpMode:
    """One term ``exp(sign*rate*(eta + beta/alpha*y)) * (A cos(phase) + B sin(phase))``.

    ``rate = sqrt(alpha*(alpha - beta))`` and ``phase = alpha*xi + beta*(q - y)``.
    """

    alpha: Scalar
    beta: Scalar
    A: Scalar = Fraction(1)
    B: Scalar = Fraction(0)
    sign: int = 1

    def __post_init__(self):
        for name in ("alpha", "beta", "A", "B"):
            object.__setattr__(self, name, scalar(getattr(self, name)))
        sign = self.sign
        if isinstance(sign, str):
            sign = {"+": 1, "-": -1}.get(sign.strip())
        if sign not in (1, -1):
            raise ValueError(f"sign must be + or -, got {self.sign!r}")
        object.__setattr__(self, "sign", sign)
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")
        if self.alpha * (self.alpha - self.beta) < 0:
            raise ValueError("alpha*(alpha - beta) < 0: the exponential rate is not real")

    @property
    def rate(self) -> Scalar:
        return exact_sqrt(self.alpha * (self.alpha - self.beta))

    @property
    def exact(self) -> bool:
        from .exprcore.scalars import all_exact

        return all_exact((self.rate, self.alpha, self.beta, self.A, self.B))

    def expression(self) -> Expression:
        eta, xi, q, y = (_var(n) for n in ETA_XI.variables)
        phase = xi * self.alpha + (q - y) * self.beta
        growth = (eta + y * (self.beta / self.alpha)) * (self.sign * self.rate)
        return Expression.exp(growth) * (Expression.cos(phase) * self.A + Expression.sin(phase) * self.B)

    @classmethod
    def from_dict(cls, d: Mapping) -> ExpMode:
        allowed = {"alpha", "beta", "A", "B", "sign"}
        extra = set(d) - allowed
        if extra:
            raise ValueError(f"unknown mode fields {sorted(extra)}")
        if "alpha" not in d or "beta" not in d:
            raise ValueError("a mode needs alpha and beta")
        return cls(scalar(d["alpha"]), scalar(d["beta"]), scalar(d.get("A", 1)),
                   scalar(d.get("B", 0)), d.get("sign", 1))

    def as_dict(self) -> dict:
        from .exprcore.scalars import format_scalar

        return {"alpha": format_scalar(self.alpha), "beta": format_scalar(self.beta),
                "A": format_scalar(self.A), "B": format_scalar(self.B),
                "sign": "+" if self.sign > 0 else "-"}


def exp_solution(modes: Iterable[ExpMode]) -> Expression:
    """Finite superposition of exponential modes, over ``(eta, xi, q, y)``."""
    out = Expression(ETA_XI)
    for m in modes:
        out = out + m.expression()
    return out


def load_modes(source: Union[str, Sequence[Mapping]]) -> list[ExpMode]:
    """Modes from a JSON document (text) or an already decoded list."""
    doc = json.loads(source) if isinstance(source, str) else source
    if isinstance(doc, Mapping):
        doc = [doc]
    return [ExpMode.from_dict(d) for d in doc]


# -- polynomial family ---------------------------------------------------------


@dataclass(frozen=True)
class PolyParams:
    f: Scalar = Fraction(0)
    g: Scalar = Fraction(0)
    h: Scalar = Fraction(0)
    k: Scalar = Fraction(0)
    mu: Scalar = Fraction(0)
    D: Scalar = Fraction(0)

    def __post_init__(self):
        for fl in fields(self):
            object.__setattr__(self, fl.name, scalar(getattr(self, fl.name)))

    @classmethod
    def from_dict(cls, d: Mapping) -> PolyParams:
        names = {fl.name for fl in fields(cls)}
        extra = set(d) - names
        if extra:
            raise ValueError(f"unknown polynomial parameters {sorted(extra)}")
        return cls(**{k: scalar(v) for k, v in d.items()})

    @classmethod
    def parse(cls, text: str) -> PolyParams:
        """``"g=1,D=1"`` or a JSON object."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_dict(json.loads(text))
        values = {}
        for item in filter(None, (s.strip() for s in text.split(","))):
            name, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"bad parameter assignment {item!r}")
            values[name.strip()] = value.strip()
        return cls.from_dict(values)

    def as_dict(self) -> dict:
        from .exprcore.scalars import format_scalar

        return {fl.name: format_scalar(getattr(self, fl.name)) for fl in fields(self)}


def poly_coefficients(p: PolyParams) -> tuple[Expression, Expression, Expression]:
    """The coefficient functions ``A, B, C`` of ``q^2/2``, ``q`` and ``1``."""
    eta, xi, y = _var("eta"), _var("xi"), _var("y")
    f, g, h, k, mu = p.f, p.g, p.h, p.k, p.mu
    A = (4 * g * (eta ** 2 - xi ** 2) + 2 * h * eta * xi + k * y ** 2) * 3
    B = (((4 * g + h) * (xi ** 2 - eta ** 2) + 2 * (4 * g - h) * eta * xi) * y
         + h * eta * xi ** 2 - 4 * g * eta ** 2 * xi + mu * (xi ** 2 - eta ** 2)) * 3
    C = (k * eta * y ** 3 + 3 * (h * (eta ** 2 - xi ** 2) - 8 * g * eta * xi) * y ** 2
         + f * (xi * eta ** 3 - eta * xi ** 3) + (h * eta + mu) * xi ** 3 - g * eta ** 4
         + (h * xi ** 3 + 8 * g * eta ** 3 + 12 * g * eta ** 2 * xi - 3 * (4 * g + h) * eta * xi ** 2
            + 3 * mu * (eta ** 2 - xi ** 2) - 6 * mu * eta * xi) * y)
    return A, B, C


def poly_solution(p: PolyParams) -> Expression:
    """``A q^2/2 + B q + C + D (xi + q - y)^4`` over ``(eta, xi, q, y)``."""
    q = _var("q")
    A, B, C = poly_coefficients(p)
    quartic = (_var("xi") + q - _var("y")) ** 4
    return A * q ** 2 / 2 + B * q + C + quartic * p.D


# -- residuals -----------------------------------------------------------------


@dataclass(frozen=True)
class LinearSystemResiduals:
    r_813: Expression
    r_812: Expression
    r_814: Expression

    def as_tuple(self) -> tuple[Expression, Expression, Expression]:
        return (self.r_813, self.r_812, self.r_814)

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.as_tuple())

    def at(self, pt: Point) -> tuple[Scalar, Scalar, Scalar]:
        return tuple(r.evaluate(pt) for r in self.as_tuple())


def _d(v: Expression, names: str) -> Expression:
    from .exprcore.jets import split_names

    for n in split_names(names, v.chart):
        v = v.diff(n)
    return v


def linear_residuals(v: Expression) -> LinearSystemResiduals:
    """The three linear equations in ``(eta, xi, q, y)``."""
    require_same_chart(v.chart, ETA_XI)

    def d(*names):
        out = v
        for n in names:
            out = out.diff(n)
        return out

    r_813 = d("eta", "eta") + d("xi", "xi") - d("xi", "q")
    r_812 = d("xi", "q") - d("eta", "q") + d("xi", "y")
    r_814 = d("xi", "q") + d("eta", "q") - d("q", "q") + d("eta", "y")
    return LinearSystemResiduals(r_813, r_812, r_814)


def _vj(names: str, dep: str = "v") -> JetPoly:
    return JetPoly.jet(dep, names, TPQY)


def leg2_poly(dep: str = "v") -> JetPoly:
    """``v_pq - v_qq - v_tq + v_py``: the translation constraint after the Legendre map."""
    return _vj("pq", dep) - _vj("qq", dep) - _vj("tq", dep) + _vj("py", dep)


def leg31_poly(eps=1, lam=-1, dep: str = "v") -> JetPoly:
    """``lam v_pq - v_tq + eps v_qq - v_ty``."""
    return lam * _vj("pq", dep) - _vj("tq", dep) + eps * _vj("qq", dep) - _vj("ty", dep)


def leg32_poly(eps=1, lam=-1, dep: str = "v") -> JetPoly:
    """``lam v_pp - v_tq + eps v_pq - v_tt``."""
    return lam * _vj("pp", dep) - _vj("tq", dep) + eps * _vj("pq", dep) - _vj("tt", dep)


@dataclass(frozen=True)
class ConstraintResiduals:
    r_leg2: Expression
    r_931: Expression
    r_932: Expression

    def as_tuple(self) -> tuple[Expression, Expression, Expression]:
        return (self.r_leg2, self.r_931, self.r_932)

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.as_tuple())

    def at(self, pt: Point) -> tuple[Scalar, Scalar, Scalar]:
        return tuple(r.evaluate(pt) for r in self.as_tuple())


def constraint_residuals(v: Expression, eps=1, lam=-1) -> ConstraintResiduals:
    """Residuals of the three linear constraints on ``v(t, p, q, y)``."""
    require_same_chart(v.chart, TPQY)
    eps, lam = scalar(eps), scalar(lam)
    fields_ = {"v": v}
    return ConstraintResiduals(leg2_poly().to_expression(fields_),
                               leg31_poly(eps, lam).to_expression(fields_),
                               leg32_poly(eps, lam).to_expression(fields_))


def principal_forms(eps=1, lam=-1, dep: str = "v") -> dict[str, JetPoly]:
    """The constraints solved for ``v_ty``, ``v_tq`` and ``v_py`` (right-hand sides)."""
    return {
        "ty": eps * (_vj("qq", dep) - _vj("pq", dep)) + lam * (_vj("pq", dep) - _vj("pp", dep)) + _vj("tt", dep),
        "tq": eps * _vj("pq", dep) + lam * _vj("pp", dep) - _vj("tt", dep),
        "py": (eps - 1) * _vj("pq", dep) + lam * _vj("pp", dep) + _vj("qq", dep) - _vj("tt", dep),
    }


def principal_residuals(v: Expression, eps=1, lam=-1) -> dict[str, Expression]:
    """``v_ty - rhs`` etc. for the solved form of the constraints."""
    require_same_chart(v.chart, TPQY)
    out = {}
    for key, rhs in principal_forms(scalar(eps), scalar(lam)).items():
        out[key] = _d(v, key) - rhs.to_expression({"v": v})
    return out


class LambdaUndefined(ZeroDivisionError):
    """``v_pq`` vanishes, so the constraint does not determine lambda."""


def lambda_diagnostic(v: Expression, pt: Point, eps=1, tol: float = 0.0) -> Scalar:
    """``lambda = (v_tq - eps v_qq + v_ty) / v_pq`` at ``pt``."""
    require_same_chart(v.chart, TPQY)
    j = jet(v, pt, 2)
    den = j["pq"]
    if den == 0 or abs(den) <= tol:
        raise LambdaUndefined(f"v_pq = {den} at {pt.as_dict()}; lambda undefined")
    return (j["tq"] - scalar(eps) * j["qq"] + j["ty"]) / den


def degenerate_eps_identity(eps=-1, lam=1) -> JetPoly:
    """``leg2 - leg31``; for ``eps = -1, lam = 1`` this is ``v_ty + v_py``."""
    return leg2_poly() - leg31_poly(scalar(eps), scalar(lam))


def is_y_derivative(P: JetPoly, y: str = "y") -> bool:
    """True when every jet variable carries at least one ``y``, so ``P = D_y(...)`` for linear ``P``."""
    iy = get_chart(P.chart).index(y)
    return all(jv.counts[iy] > 0 for jv in P.jetvars())


def reduced_residual(w: Expression, eps=1) -> Expression:
    """Residual of the reduced equation (chart ``sty``) or its linearisation (chart ``rty``)."""
    eps = scalar(eps)
    if w.chart == STY:
        def d(a, b):
            return w.diff(a).diff(b)
        return (d("t", "s") * d("s", "y") - d("t", "y") * d("s", "s")
                + d("t", "t") * d("s", "s") - d("t", "s") ** 2 - eps)
    if w.chart == RTY:
        return w.diff("t").diff("t") + w.diff("r").diff("r") * eps - w.diff("t").diff("y")
    raise ValueError(f"reduced residual needs chart sty or rty, got {w.chart}")


# -- constraints on u in (t, x, y, z) -----------------------------------------


def _uj(names: str) -> JetPoly:
    return JetPoly.jet("u", names, TXYZ)


def mixed_constraint_polys(eps=1) -> dict[str, JetPoly]:
    """Invariance under the translation ``u_x + u_z`` paired with itself, on ``u(t, x, y, z)``."""
    u = _uj
    r3a = u("xx") + u("xz") - (u("tz") * u("xx") - u("tx") * u("xz") + u("xz") * u("yz") - u("xy") * u("zz"))
    r3b = u("tx") + u("tz") - (u("tx") * (u("tx") + u("tz")) - u("tt") * (u("xx") + u("xz"))
                               + u("tz") * (u("xy") + u("yz")) - u("ty") * (u("xz") + u("zz")))
    r3p = u("tx") + u("tz") - (u("tx") * u("tz") - u("tt") * u("xz") + u("tz") * u("yz")
                               - u("ty") * u("zz") - eps)
    return {"r_3a": r3a, "r_3b": r3b, "r_3b_reduced": r3p}
