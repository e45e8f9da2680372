"""Exact closed-class functions of the chart variables.

An :class:`Expression` is a finite sum of terms

    coeff * x1^e1 ... xn^en * exp(L1) * {sin|cos}(L2)

with ``L1``, ``L2`` affine linear forms.  The class is closed under ``+``,
``*``, scalar multiples and partial derivatives; products of trigonometric
factors are folded back with product-to-sum identities.  Terms are kept
normalised (zero exp/trig arguments removed, trig arguments sign-fixed) so
that structural equality coincides with equality of the stored term maps.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional

from . import scalars
from .charts import Chart, ChartError, LinearForm, Point, get_chart, join_signed, require_same_chart
from .scalars import ONE, ZERO, Scalar, scalar

HALF = Fraction(1, 2)

Trig = Optional[tuple]  # ("sin" | "cos", LinearForm) or None
TermKey = tuple  # (monomial exponents, exp LinearForm | None, Trig)


class NotLinearError(ValueError):
    """An exp/sin/cos argument (or a map image) is not an affine linear form."""


class IntegrationError(ValueError):
    pass


def _normalize(coef: Scalar, mono: tuple, ex: Optional[LinearForm], trig: Trig):
    """Return ``(key, coef)`` for a raw term or ``None`` when it vanishes."""
    if coef == 0:
        return None
    if ex is not None and ex.is_zero():
        ex = None
    if trig is not None:
        kind, lf = trig
        if lf.is_zero():
            if kind == "sin":
                return None
            trig = None
        elif lf.leading_sign() < 0:
            trig = (kind, -lf)
            if kind == "sin":
                coef = -coef
    return (mono, ex, trig), coef


def _trig_product(t1: Trig, t2: Trig) -> list[tuple[Scalar, Trig]]:
    if t1 is None:
        return [(ONE, t2)]
    if t2 is None:
        return [(ONE, t1)]
    (k1, a), (k2, b) = t1, t2
    if k1 == "sin" and k2 == "sin":
        return [(HALF, ("cos", a - b)), (-HALF, ("cos", a + b))]
    if k1 == "cos" and k2 == "cos":
        return [(HALF, ("cos", a - b)), (HALF, ("cos", a + b))]
    if k1 == "sin":
        return [(HALF, ("sin", a + b)), (HALF, ("sin", a - b))]
    return [(HALF, ("sin", a + b)), (HALF, ("sin", b - a))]


def _lf_key(lf: Optional[LinearForm]) -> tuple:
    if lf is None:
        return ()
    return (1, tuple(lf.coeffs), lf.const)


def _sort_key(key: TermKey) -> tuple:
    mono, ex, trig = key
    trig_key = () if trig is None else (0 if trig[0] == "cos" else 1, _lf_key(trig[1]))
    return (-sum(mono), tuple(-e for e in mono), _lf_key(ex), trig_key)


class Expression:
    """Immutable sum of closed-class terms over a fixed chart."""

    __slots__ = ("chart", "_terms")

    def __init__(self, chart, terms: Optional[Mapping[TermKey, Scalar]] = None):
        self.chart: Chart = get_chart(chart)
        self._terms: dict[TermKey, Scalar] = {}
        if terms:
            for key, coef in terms.items():
                self._accumulate(key, coef)

    # -- construction -------------------------------------------------------

    def _accumulate(self, key: TermKey, coef: Scalar) -> None:
        norm = _normalize(coef, *key)
        if norm is None:
            return
        nkey, ncoef = norm
        total = self._terms.get(nkey, ZERO) + ncoef
        if total == 0:
            self._terms.pop(nkey, None)
        else:
            self._terms[nkey] = total

    @classmethod
    def _from_raw(cls, chart: Chart, raw: Iterable[tuple[TermKey, Scalar]]) -> Expression:
        out = cls(chart)
        for key, coef in raw:
            out._accumulate(key, coef)
        return out

    @classmethod
    def constant(cls, chart, value) -> Expression:
        chart = get_chart(chart)
        return cls._from_raw(chart, [(((0,) * chart.dim, None, None), scalar(value))])

    @classmethod
    def variable(cls, chart, var: str) -> Expression:
        chart = get_chart(chart)
        mono = [0] * chart.dim
        mono[chart.index(var)] = 1
        return cls._from_raw(chart, [((tuple(mono), None, None), ONE)])

    @classmethod
    def from_linear_form(cls, lf: LinearForm) -> Expression:
        chart = lf.chart
        raw = [((tuple(1 if j == i else 0 for j in range(chart.dim)), None, None), c)
               for i, c in enumerate(lf.coeffs)]
        raw.append((((0,) * chart.dim, None, None), lf.const))
        return cls._from_raw(chart, raw)

    @classmethod
    def exp(cls, arg) -> Expression:
        lf = _as_lf(arg)
        return cls._from_raw(lf.chart, [(((0,) * lf.chart.dim, lf, None), ONE)])

    @classmethod
    def sin(cls, arg) -> Expression:
        lf = _as_lf(arg)
        return cls._from_raw(lf.chart, [(((0,) * lf.chart.dim, None, ("sin", lf)), ONE)])

    @classmethod
    def cos(cls, arg) -> Expression:
        lf = _as_lf(arg)
        return cls._from_raw(lf.chart, [(((0,) * lf.chart.dim, None, ("cos", lf)), ONE)])

    # -- inspection ---------------------------------------------------------

    def terms(self) -> Iterator[tuple[TermKey, Scalar]]:
        for key in sorted(self._terms, key=_sort_key):
            yield key, self._terms[key]

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_polynomial(self) -> bool:
        return all(ex is None and trig is None for _, ex, trig in self._terms)

    def degree(self) -> int:
        """Total polynomial degree (-1 for zero); transcendental factors ignored."""
        return max((sum(mono) for mono, _, _ in self._terms), default=-1)

    @property
    def exact(self) -> bool:
        for (mono, ex, trig), coef in self._terms.items():
            if not scalars.is_exact(coef):
                return False
            if ex is not None and not ex.exact:
                return False
            if trig is not None and not trig[1].exact:
                return False
        return True

    def as_linear_form(self) -> LinearForm:
        if not self.is_polynomial() or self.degree() > 1:
            raise NotLinearError(f"not an affine linear form: {self}")
        coeffs = [ZERO] * self.chart.dim
        const = ZERO
        for (mono, _, _), coef in self._terms.items():
            if sum(mono) == 0:
                const = coef
            else:
                coeffs[mono.index(1)] = coef
        return LinearForm(self.chart, tuple(coeffs), const)

    def as_scalar(self) -> Scalar:
        if not self._terms:
            return ZERO
        if self.is_polynomial() and self.degree() == 0:
            return next(iter(self._terms.values()))
        raise ValueError(f"not a constant: {self}")

    def depends_on(self, var: str) -> bool:
        return not self.diff(var).is_zero()

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Expression:
        if isinstance(other, Expression):
            require_same_chart(self.chart, other.chart)
            return other
        return Expression.constant(self.chart, other)

    def __add__(self, other) -> Expression:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = Expression(self.chart)
        out._terms = dict(self._terms)
        for key, coef in other._terms.items():
            total = out._terms.get(key, ZERO) + coef
            if total == 0:
                out._terms.pop(key, None)
            else:
                out._terms[key] = total
        return out

    __radd__ = __add__

    def __neg__(self) -> Expression:
        out = Expression(self.chart)
        out._terms = {k: -c for k, c in self._terms.items()}
        return out

    def __pos__(self) -> Expression:
        return self

    def __sub__(self, other) -> Expression:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Expression:
        return (-self) + other

    def __mul__(self, other) -> Expression:
        if not isinstance(other, Expression):
            try:
                k = scalar(other)
            except TypeError:
                return NotImplemented
            return self.scale(k)
        require_same_chart(self.chart, other.chart)
        raw = []
        for (m1, e1, t1), c1 in self._terms.items():
            for (m2, e2, t2), c2 in other._terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                if e1 is None:
                    ex = e2
                elif e2 is None:
                    ex = e1
                else:
                    ex = e1 + e2
                for factor, trig in _trig_product(t1, t2):
                    raw.append(((mono, ex, trig), c1 * c2 * factor))
        return Expression._from_raw(self.chart, raw)

    __rmul__ = __mul__

    def scale(self, k: Scalar) -> Expression:
        out = Expression(self.chart)
        if k != 0:
            out._terms = {key: c * k for key, c in self._terms.items()}
        return out

    def __truediv__(self, other) -> Expression:
        if isinstance(other, Expression):
            other = other.as_scalar()
        other = scalar(other)
        if other == 0:
            raise ZeroDivisionError("division of an expression by zero")
        if isinstance(other, Fraction):
            return self.scale(1 / other)
        return self.scale(1.0 / other)

    def __pow__(self, n: int) -> Expression:
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Expression.constant(self.chart, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Expression):
            return self.chart == other.chart and self._terms == other._terms
        try:
            return self == Expression.constant(self.chart, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.chart, frozenset(self._terms.items())))

    # -- calculus -----------------------------------------------------------

    def diff(self, var: str) -> Expression:
        i = self.chart.index(var)
        raw = []
        for (mono, ex, trig), coef in self._terms.items():
            if mono[i]:
                lowered = mono[:i] + (mono[i] - 1,) + mono[i + 1:]
                raw.append(((lowered, ex, trig), coef * mono[i]))
            if ex is not None and ex.coeffs[i] != 0:
                raw.append(((mono, ex, trig), coef * ex.coeffs[i]))
            if trig is not None and trig[1].coeffs[i] != 0:
                kind, lf = trig
                b = lf.coeffs[i]
                if kind == "sin":
                    raw.append(((mono, ex, ("cos", lf)), coef * b))
                else:
                    raw.append(((mono, ex, ("sin", lf)), -coef * b))
        return Expression._from_raw(self.chart, raw)

    def integrate(self, var: str) -> Expression:
        """An antiderivative in ``var`` with no added function of the other variables."""
        i = self.chart.index(var)
        groups: dict[tuple, dict[tuple[int, str], Scalar]] = {}
        for (mono, ex, trig), coef in self._terms.items():
            rest = mono[:i] + (0,) + mono[i + 1:]
            lf = None if trig is None else trig[1]
            slot = "1" if trig is None else trig[0]
            groups.setdefault((rest, ex, lf), {})[(mono[i], slot)] = coef
        raw = []
        for (rest, ex, lf), coeffs in groups.items():
            a = ZERO if ex is None else ex.coeffs[i]
            b = ZERO if lf is None else lf.coeffs[i]
            top = max(k for k, _ in coeffs)

            def put(k, slot, c):
                mono = rest[:i] + (k,) + rest[i + 1:]
                trig = None if slot == "1" else (slot, lf)
                raw.append(((mono, ex, trig), c))

            if a == 0 and b == 0:
                for (k, slot), c in coeffs.items():
                    put(k + 1, slot, c / (k + 1) if isinstance(c, float) else Fraction(c) / (k + 1))
                continue
            # Solve d/dvar X = target inside span{var^k * E * (cos, sin)}, top degree downward.
            det = a * a + b * b
            next_c = next_s = ZERO
            for k in range(top, -1, -1):
                if lf is None:
                    rhs = coeffs.get((k, "1"), ZERO) - (k + 1) * next_c
                    ck, sk = rhs / a, ZERO
                else:
                    rc = coeffs.get((k, "cos"), ZERO) - (k + 1) * next_c
                    rs = coeffs.get((k, "sin"), ZERO) - (k + 1) * next_s
                    # [a  b; -b  a] [c; s] = [rc; rs]
                    ck = (a * rc - b * rs) / det
                    sk = (b * rc + a * rs) / det
                if lf is None:
                    put(k, "1", ck)
                else:
                    put(k, "cos", ck)
                    put(k, "sin", sk)
                next_c, next_s = ck, sk
        return Expression._from_raw(self.chart, raw)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point: Point) -> Scalar:
        require_same_chart(self.chart, point.chart)
        total: Scalar = ZERO
        xs = point.coords
        for (mono, ex, trig), coef in self._terms.items():
            value = coef
            for x, e in zip(xs, mono):
                if e:
                    value = value * x ** e
            if ex is not None:
                value = value * scalars.exp(ex.evaluate(point))
            if trig is not None:
                arg = trig[1].evaluate(point)
                value = value * (scalars.sin(arg) if trig[0] == "sin" else scalars.cos(arg))
            total = total + value
        return total

    def __call__(self, *coords, **named) -> Scalar:
        return self.evaluate(Point.of(self.chart, *coords, **named))

    # -- substitution -------------------------------------------------------

    def substitute(self, target, images: Mapping[str, object]) -> Expression:
        """Replace every chart variable by an affine form over ``target``.

        ``images`` maps each source variable to a LinearForm, an affine
        Expression or a scalar over the target chart; variables left out
        map to the same-named target variable.
        """
        target = get_chart(target)
        lfs = []
        for var in self.chart.variables:
            img = images.get(var, var)
            if isinstance(img, str):
                img = LinearForm.variable(target, img)
            elif isinstance(img, Expression):
                require_same_chart(img.chart, target)
                img = img.as_linear_form()
            elif not isinstance(img, LinearForm):
                img = LinearForm.constant(target, img)
            require_same_chart(img.chart, target)
            lfs.append(img)
        return _substitute(self, target, lfs)

    def restrict(self, values: Mapping[str, object]) -> Expression:
        """Fix some variables to constants (result stays on the same chart)."""
        images = {v: scalar(values[v]) for v in values}
        for v in images:
            self.chart.index(v)
        return self.substitute(self.chart, images)

    # -- text ---------------------------------------------------------------

    def to_text(self) -> str:
        parts = []
        for (mono, ex, trig), coef in self.terms():
            body = []
            for var, e in zip(self.chart.variables, mono):
                if e == 1:
                    body.append(var)
                elif e:
                    body.append(f"{var}^{e}")
            if ex is not None:
                body.append(f"exp({ex.to_text()})")
            if trig is not None:
                body.append(f"{trig[0]}({trig[1].to_text()})")
            parts.append((coef, "*".join(body)))
        if not parts:
            return "0"
        return join_signed(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Expression({self.chart.name}, {self.to_text()!r})"


def _as_lf(arg) -> LinearForm:
    if isinstance(arg, LinearForm):
        return arg
    if isinstance(arg, Expression):
        return arg.as_linear_form()
    raise NotLinearError(f"expected a linear form, got {arg!r}")


def _compose_lf(lf: LinearForm, images: list[LinearForm], target: Chart) -> LinearForm:
    coeffs = [ZERO] * target.dim
    const = lf.const
    for a, img in zip(lf.coeffs, images):
        if a == 0:
            continue
        for j, b in enumerate(img.coeffs):
            if b != 0:
                coeffs[j] = coeffs[j] + a * b
        const = const + a * img.const
    return LinearForm(target, tuple(coeffs), const)


def _substitute(e: Expression, target: Chart, images: list[LinearForm]) -> Expression:
    bases = [Expression.from_linear_form(img) for img in images]
    power_cache: dict[tuple[int, int], Expression] = {}

    def power(i: int, k: int) -> Expression:
        if (i, k) not in power_cache:
            power_cache[(i, k)] = bases[i] ** k
        return power_cache[(i, k)]

    result = Expression(target)
    for (mono, ex, trig), coef in e._terms.items():
        factor = Expression.constant(target, coef)
        for i, k in enumerate(mono):
            if k:
                factor = factor * power(i, k)
        new_ex = None if ex is None else _compose_lf(ex, images, target)
        new_trig = None if trig is None else (trig[0], _compose_lf(trig[1], images, target))
        extra = Expression._from_raw(target, [(((0,) * target.dim, new_ex, new_trig), ONE)])
        result = result + factor * extra
    return result


def differentiate(e: Expression, var: str) -> Expression:
    return e.diff(var)


def derivative(e: Expression, counts: tuple) -> Expression:
    """Mixed partial given per-variable derivative counts."""
    for var, k in zip(e.chart.variables, counts):
        for _ in range(k):
            e = e.diff(var)
    return e


class LinearMap:
    """Invertible affine change of chart: each source variable as a form over the target chart."""

    def __init__(self, source, target, images: Mapping[str, object]):
        self.source = get_chart(source)
        self.target = get_chart(target)
        if self.source.dim != self.target.dim:
            raise ChartError("linear chart maps must preserve dimension")
        lfs = []
        for var in self.source.variables:
            img = images.get(var, var)
            if isinstance(img, str):
                from .parsing import parse_expression

                img = parse_expression(img, self.target)
            if isinstance(img, Expression):
                img = img.as_linear_form()
            if not isinstance(img, LinearForm):
                raise NotLinearError(f"image of {var} is not a linear form")
            lfs.append(img)
        self.images: tuple[LinearForm, ...] = tuple(lfs)
        from ..linalg import SingularMatrixError, det

        matrix = [list(lf.coeffs) for lf in self.images]
        if det(matrix) == 0:
            raise SingularMatrixError("linear chart map is singular")

    def matrix(self) -> list[list[Scalar]]:
        return [list(lf.coeffs) for lf in self.images]

    def __call__(self, e: Expression) -> Expression:
        require_same_chart(e.chart, self.source)
        return _substitute(e, self.target, list(self.images))

    def map_point(self, point: Point) -> Point:
        """Target point -> source point (the direction the images are written in)."""
        require_same_chart(point.chart, self.target)
        return Point(self.source, tuple(lf.evaluate(point) for lf in self.images))

    def inverse(self) -> LinearMap:
        from ..linalg import inverse

        m = self.matrix()
        inv = inverse(m)
        consts = [lf.const for lf in self.images]
        images = {}
        for j, var in enumerate(self.target.variables):
            coeffs = tuple(scalar(inv[j][i]) for i in range(self.source.dim))
            shift = -sum((inv[j][i] * consts[i] for i in range(self.source.dim)), ZERO)
            images[var] = LinearForm(self.source, coeffs, scalar(shift))
        return LinearMap(self.target, self.source, images)


def change_vars_linear(e: Expression, mapping: LinearMap) -> Expression:
    return mapping(e)
