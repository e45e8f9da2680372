"""Differential algebra on jet coordinates.

Polynomials in jet variables ``u_J`` / ``phi_J`` (and free constant
parameters such as ``omega0``) with exact total derivatives, the
Euler-Lagrange operator, the Frechet derivative and the two-dimensional
divergence decomposition of the symmetry condition in the first two chart
variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .exprcore import TXYZ, Chart, ChartError, Expression, JetTable, get_chart, split_names
from .exprcore.charts import join_signed, require_same_chart
from .exprcore.expression import derivative
from .exprcore.parsing import ParseError, Parser
from .exprcore.scalars import ZERO, Scalar, all_exact, scalar

MAX_ORDER = 6
DEPENDENTS = ("u", "v", "w", "phi", "psi")


class JetOrderExceeded(ValueError):
    pass


class MissingBindingError(KeyError):
    pass


@dataclass(frozen=True)
class JetVar:
    dep: str
    counts: tuple[int, ...]

    @property
    def order(self) -> int:
        return sum(self.counts)

    def bump(self, i: int) -> JetVar:
        counts = list(self.counts)
        counts[i] += 1
        if sum(counts) > MAX_ORDER:
            raise JetOrderExceeded(f"jet order bound {MAX_ORDER} exceeded")
        return JetVar(self.dep, tuple(counts))

    def name(self, chart: Chart) -> str:
        if not self.order:
            return self.dep
        suffix = "".join(v * c for v, c in zip(chart.variables, self.counts))
        return f"{self.dep}_{suffix}"


@dataclass(frozen=True)
class Param:
    name: str


Symbol = Union[JetVar, Param]
Monomial = tuple  # tuple[(Symbol, int), ...] sorted by _sym_key


def _sym_key(s: Symbol) -> tuple:
    if isinstance(s, JetVar):
        return (0, s.dep, s.order, tuple(-c for c in s.counts))
    return (1, s.name)


def _mono_key(m: Monomial) -> tuple:
    return (-sum(k for _, k in m), tuple((_sym_key(s), -k) for s, k in m))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers: dict[Symbol, int] = dict(a)
    for s, k in b:
        powers[s] = powers.get(s, 0) + k
    return tuple(sorted(powers.items(), key=lambda sk: _sym_key(sk[0])))


class JetPoly:
    """Sparse polynomial in jet variables and constant parameters over a chart."""

    __slots__ = ("chart", "_terms")

    def __init__(self, chart=TXYZ, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.chart: Chart = get_chart(chart)
        self._terms: dict[Monomial, Scalar] = {}
        for m, c in (terms or {}).items():
            if c != 0:
                self._terms[m] = self._terms.get(m, ZERO) + c
                if self._terms[m] == 0:
                    del self._terms[m]

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, value, chart=TXYZ) -> JetPoly:
        return cls(chart, {(): scalar(value)})

    @classmethod
    def jet(cls, dep: str, names: Union[str, Iterable[str]] = (), chart=TXYZ) -> JetPoly:
        chart = get_chart(chart)
        if isinstance(names, str):
            names = split_names(names, chart)
        counts = [0] * chart.dim
        for n in names:
            counts[chart.index(n)] += 1
        if sum(counts) > MAX_ORDER:
            raise JetOrderExceeded(f"jet order bound {MAX_ORDER} exceeded")
        return cls(chart, {((JetVar(dep, tuple(counts)), 1),): Fraction(1)})

    @classmethod
    def param(cls, name: str, chart=TXYZ) -> JetPoly:
        return cls(chart, {((Param(name), 1),): Fraction(1)})

    # -- inspection ---------------------------------------------------------

    def terms(self):
        for m in sorted(self._terms, key=_mono_key):
            yield m, self._terms[m]

    def is_zero(self) -> bool:
        return not self._terms

    def symbols(self) -> set[Symbol]:
        return {s for m in self._terms for s, _ in m}

    def jetvars(self, dep: Optional[str] = None) -> list[JetVar]:
        out = [s for s in self.symbols() if isinstance(s, JetVar) and (dep is None or s.dep == dep)]
        return sorted(out, key=_sym_key)

    def params(self) -> set[str]:
        return {s.name for s in self.symbols() if isinstance(s, Param)}

    def degree_in(self, dep: str) -> int:
        return max((sum(k for s, k in m if isinstance(s, JetVar) and s.dep == dep)
                    for m in self._terms), default=0)

    def max_order(self) -> int:
        return max((s.order for s in self.symbols() if isinstance(s, JetVar)), default=0)

    @property
    def exact(self) -> bool:
        return all_exact(self._terms.values())

    def coefficient(self, monomial: Monomial) -> Scalar:
        return self._terms.get(monomial, ZERO)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> JetPoly:
        if isinstance(other, JetPoly):
            require_same_chart(self.chart, other.chart)
            return other
        return JetPoly.const(other, self.chart)

    def __add__(self, other) -> JetPoly:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, ZERO) + c
        return JetPoly(self.chart, out)

    __radd__ = __add__

    def __neg__(self) -> JetPoly:
        return JetPoly(self.chart, {m: -c for m, c in self._terms.items()})

    def __pos__(self) -> JetPoly:
        return self

    def __sub__(self, other) -> JetPoly:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> JetPoly:
        return (-self) + other

    def __mul__(self, other) -> JetPoly:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[Monomial, Scalar] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, ZERO) + c1 * c2
        return JetPoly(self.chart, out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> JetPoly:
        if isinstance(other, JetPoly):
            if other.symbols():
                raise ValueError("division by a non-constant jet polynomial")
            other = other._terms.get((), ZERO)
        other = scalar(other)
        if other == 0:
            raise ZeroDivisionError("division of a jet polynomial by zero")
        inv = 1 / other
        return JetPoly(self.chart, {m: c * inv for m, c in self._terms.items()})

    def __pow__(self, n: int) -> JetPoly:
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = JetPoly.const(1, self.chart)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, JetPoly):
            return self.chart == other.chart and self._terms == other._terms
        try:
            return self == JetPoly.const(other, self.chart)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.chart, frozenset(self._terms.items())))

    # -- calculus -----------------------------------------------------------

    def diff(self, sym: Union[Symbol, JetPoly]) -> JetPoly:
        """Partial derivative with respect to one jet variable or parameter."""
        if isinstance(sym, JetPoly):
            syms = list(sym.symbols())
            if len(syms) != 1 or len(sym._terms) != 1:
                raise ValueError("can only differentiate with respect to a single symbol")
            sym = syms[0]
        out: dict[Monomial, Scalar] = {}
        for m, c in self._terms.items():
            powers = dict(m)
            k = powers.get(sym, 0)
            if not k:
                continue
            if k == 1:
                del powers[sym]
            else:
                powers[sym] = k - 1
            nm = tuple(sorted(powers.items(), key=lambda sk: _sym_key(sk[0])))
            out[nm] = out.get(nm, ZERO) + c * k
        return JetPoly(self.chart, out)

    def total_derivative(self, var: str) -> JetPoly:
        i = self.chart.index(var)
        out: dict[Monomial, Scalar] = {}
        for m, c in self._terms.items():
            for j, (s, k) in enumerate(m):
                if not isinstance(s, JetVar):
                    continue
                rest = m[:j] + ((s, k - 1),) + m[j + 1:] if k > 1 else m[:j] + m[j + 1:]
                nm = _mono_mul(rest, ((s.bump(i), 1),))
                out[nm] = out.get(nm, ZERO) + c * k
        return JetPoly(self.chart, out)

    def D(self, *vars: str) -> JetPoly:
        out = self
        for v in vars:
            out = out.total_derivative(v)
        return out

    # -- substitution and evaluation ---------------------------------------

    def subs_params(self, values: Mapping[str, object]) -> JetPoly:
        out = JetPoly(self.chart)
        for m, c in self._terms.items():
            term = JetPoly.const(c, self.chart)
            for s, k in m:
                if isinstance(s, Param) and s.name in values:
                    val = values[s.name]
                    factor = val if isinstance(val, JetPoly) else JetPoly.const(val, self.chart)
                else:
                    factor = JetPoly(self.chart, {((s, 1),): Fraction(1)})
                term = term * factor ** k
            out = out + term
        return out

    def evaluate(self, bindings: Mapping[str, JetTable], params: Optional[Mapping[str, object]] = None) -> Scalar:
        params = params or {}
        total: Scalar = ZERO
        for m, c in self._terms.items():
            value = c
            for s, k in m:
                if isinstance(s, Param):
                    if s.name not in params:
                        raise MissingBindingError(f"no value for parameter {s.name!r}")
                    value = value * scalar(params[s.name]) ** k
                    continue
                table = bindings.get(s.dep)
                if table is None:
                    raise MissingBindingError(f"no jet table for {s.dep!r}")
                require_same_chart(table.chart, self.chart)
                if s.order > table.order:
                    raise MissingBindingError(f"{s.name(self.chart)} needs a jet of order {s.order}")
                value = value * table.entries[s.counts] ** k
            total = total + value
        return total

    def to_expression(self, fields: Mapping[str, Expression], params: Optional[Mapping[str, object]] = None) -> Expression:
        """Replace every jet variable by the corresponding derivative of an explicit field."""
        params = params or {}
        cache: dict[JetVar, Expression] = {}
        result = Expression(self.chart)
        for m, c in self._terms.items():
            term = Expression.constant(self.chart, c)
            for s, k in m:
                if isinstance(s, Param):
                    if s.name not in params:
                        raise MissingBindingError(f"no value for parameter {s.name!r}")
                    term = term * scalar(params[s.name]) ** k
                    continue
                if s not in cache:
                    if s.dep not in fields:
                        raise MissingBindingError(f"no field for {s.dep!r}")
                    require_same_chart(fields[s.dep].chart, self.chart)
                    cache[s] = derivative(fields[s.dep], s.counts)
                term = term * cache[s] ** k
            result = result + term
        return result

    # -- text ---------------------------------------------------------------

    def to_text(self) -> str:
        parts = []
        for m, c in self.terms():
            body = "*".join(
                (s.name(self.chart) if isinstance(s, JetVar) else s.name) + (f"^{k}" if k > 1 else "")
                for s, k in m)
            parts.append((c, body))
        return join_signed(parts) if parts else "0"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"JetPoly({self.to_text()!r})"


def parse_jetpoly(text: str, chart=TXYZ, dependents: Iterable[str] = DEPENDENTS) -> JetPoly:
    """Parse ``"u_tx*phi_t - omega0*phi_x"``; bare names that are not dependents become parameters."""
    chart = get_chart(chart)
    deps = set(dependents)

    def symbol(name, pos):
        if "_" in name:
            dep, _, suffix = name.partition("_")
            if dep in deps:
                try:
                    return JetPoly.jet(dep, suffix, chart)
                except ChartError as exc:
                    raise ParseError(str(exc), pos, text) from None
        if name in deps:
            return JetPoly.jet(dep=name, chart=chart)
        return JetPoly.param(name, chart)

    return Parser(text, symbol, lambda v: JetPoly.const(v, chart)).parse()


# -- operators ------------------------------------------------------------------


def total_derivative(P: JetPoly, var: str) -> JetPoly:
    return P.total_derivative(var)


def _apply_D(P: JetPoly, counts: tuple[int, ...]) -> JetPoly:
    for var, k in zip(P.chart.variables, counts):
        for _ in range(k):
            P = P.total_derivative(var)
    return P


def euler_operator(F: JetPoly, dep: str = "u") -> JetPoly:
    """Variational derivative: sum over jets J of (-D)^J (dF/du_J)."""
    result = JetPoly(F.chart)
    for s in F.jetvars(dep):
        term = _apply_D(F.diff(s), s.counts)
        result = result + (term if s.order % 2 == 0 else -term)
    return result


def frechet(F: JetPoly, dep: str = "u", var: str = "phi") -> JetPoly:
    """Linearisation sum_J (dF/du_J) * phi_J."""
    result = JetPoly(F.chart)
    for s in F.jetvars(dep):
        phi_J = JetPoly(F.chart, {((JetVar(var, s.counts), 1),): Fraction(1)})
        result = result + F.diff(s) * phi_J
    return result


@dataclass(frozen=True)
class DivergenceWitness:
    M_bar: JetPoly
    N_bar: JetPoly
    remainder: JetPoly

    @property
    def exact_divergence(self) -> bool:
        return self.remainder.is_zero()


def two_div_decompose(F: JetPoly, dep: str = "u", var: str = "phi") -> DivergenceWitness:
    """Split the linearised equation as D_a(M_bar) - D_b(N_bar) + remainder.

    ``a``, ``b`` are the first two chart variables (``t``, ``x``); the
    remainder vanishes identically exactly when the equation has a
    two-dimensional divergence form in them.
    """
    chart = F.chart
    a, b = chart.variables[0], chart.variables[1]

    def u(*names):
        return JetPoly.jet(dep, names, chart)

    def phi(*names):
        return JetPoly.jet(var, names, chart)

    def Fd(*names):
        return F.diff(u(*names))

    others = chart.variables[2:]
    half = Fraction(1, 2)
    M = Fd(a, a) * phi(a) + half * Fd(a, b) * phi(b)
    N = Fd(b, b) * phi(b) + half * Fd(a, b) * phi(a)
    for c in others:
        M = M + Fd(a, c) * phi(c)
        N = N + Fd(b, c) * phi(c)
    M = M + (Fd(a) - Fd(a, a).D(a) - half * Fd(a, b).D(b)) * phi()
    N = N + (Fd(b) - Fd(b, b).D(b) - half * Fd(a, b).D(a)) * phi()
    N = -N
    A = frechet(F, dep, var)
    remainder = A - M.D(a) + N.D(b)
    return DivergenceWitness(M, N, remainder)


def eval_jetpoly(P: JetPoly, bindings: Mapping[str, JetTable], params: Optional[Mapping[str, object]] = None) -> Scalar:
    return P.evaluate(bindings, params)
