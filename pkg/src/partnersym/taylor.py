"""Truncated multivariate Taylor series.

A :class:`Series` holds Taylor coefficients ``c[alpha]`` of
``f(x0 + d) = sum c[alpha] d^alpha`` for ``|alpha| <= order``.  Arithmetic
truncates at the smaller order of the operands, so second-order series carry
exact values, gradients and Hessians through ``+ - * /``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .exprcore.jets import JetTable, multi_indices
from .exprcore.scalars import ZERO, Scalar, all_exact


def _fact(alpha: tuple[int, ...]) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def _div_int(c, n: int):
    return c / n if isinstance(c, float) else Fraction(c) / n


class Series:
    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs: Mapping[tuple[int, ...], Scalar] | None = None):
        self.nvars = nvars
        self.order = order
        self.coeffs: dict[tuple[int, ...], Scalar] = {}
        if coeffs:
            for k, v in coeffs.items():
                if sum(k) <= order and v != 0:
                    self.coeffs[k] = v

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, order: int, value) -> Series:
        return cls(nvars, order, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, order: int, index: int, value=ZERO) -> Series:
        unit = tuple(1 if j == index else 0 for j in range(nvars))
        return cls(nvars, order, {(0,) * nvars: value, unit: Fraction(1)})

    @classmethod
    def from_jet(cls, table: JetTable, base: tuple[int, ...] | None = None, order: int | None = None) -> Series:
        """Series of the derivative ``base`` of the tabulated function."""
        dim = table.chart.dim
        base = base or (0,) * dim
        avail = table.order - sum(base)
        order = avail if order is None else order
        if order > avail:
            raise ValueError(f"jet of order {table.order} cannot give a series of order {order} "
                             f"for a derivative of order {sum(base)}")
        coeffs = {}
        for alpha in multi_indices(dim, order):
            key = tuple(b + a for b, a in zip(base, alpha))
            coeffs[alpha] = _div_int(table.entries[key], _fact(alpha))
        return cls(dim, order, coeffs)

    # -- accessors ----------------------------------------------------------

    @property
    def value(self) -> Scalar:
        return self.coeffs.get((0,) * self.nvars, ZERO)

    def derivative_at(self, alpha: tuple[int, ...]) -> Scalar:
        """The partial derivative ``d^alpha f`` at the expansion point."""
        if sum(alpha) > self.order:
            raise ValueError("derivative order exceeds series order")
        return self.coeffs.get(tuple(alpha), ZERO) * _fact(alpha)

    @property
    def gradient(self) -> list[Scalar]:
        return [self.derivative_at(tuple(1 if j == i else 0 for j in range(self.nvars)))
                for i in range(self.nvars)]

    @property
    def hessian(self) -> list[list[Scalar]]:
        n = self.nvars
        out = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                alpha = [0] * n
                alpha[i] += 1
                alpha[j] += 1
                out[i][j] = self.derivative_at(tuple(alpha))
        return out

    @property
    def exact(self) -> bool:
        return all_exact(self.coeffs.values())

    def truncate(self, order: int) -> Series:
        return Series(self.nvars, min(order, self.order), self.coeffs)

    def diff(self, i: int) -> Series:
        """Partial derivative in variable ``i`` (order drops by one)."""
        out = {}
        for k, v in self.coeffs.items():
            if k[i]:
                lowered = k[:i] + (k[i] - 1,) + k[i + 1:]
                out[lowered] = v * k[i]
        return Series(self.nvars, max(self.order - 1, 0), out)

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other) -> Series:
        if isinstance(other, Series):
            if other.nvars != self.nvars:
                raise ValueError("series in different numbers of variables")
            return other
        return Series.constant(self.nvars, self.order, other)

    def __add__(self, other) -> Series:
        other = self._lift(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, ZERO) + v
        return Series(self.nvars, order, out)

    __radd__ = __add__

    def __neg__(self) -> Series:
        return Series(self.nvars, self.order, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other) -> Series:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Series:
        return self._lift(other) - self

    def __mul__(self, other) -> Series:
        if not isinstance(other, Series):
            return Series(self.nvars, self.order, {k: v * other for k, v in self.coeffs.items()})
        other = self._lift(other)
        order = min(self.order, other.order)
        out: dict[tuple[int, ...], Scalar] = {}
        for k1, v1 in self.coeffs.items():
            d1 = sum(k1)
            if d1 > order:
                continue
            for k2, v2 in other.coeffs.items():
                if d1 + sum(k2) > order:
                    continue
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, ZERO) + v1 * v2
        return Series(self.nvars, order, out)

    __rmul__ = __mul__

    def reciprocal(self) -> Series:
        c0 = self.value
        if c0 == 0:
            raise ZeroDivisionError("reciprocal of a series with zero constant term")
        inv0 = 1 / c0
        h = (self - c0) * inv0  # no constant term
        result = Series.constant(self.nvars, self.order, 1)
        term = Series.constant(self.nvars, self.order, 1)
        for _ in range(self.order):
            term = term * (-h)
            result = result + term
        return result * inv0

    def __truediv__(self, other) -> Series:
        if isinstance(other, Series):
            return self * other.reciprocal()
        if other == 0:
            raise ZeroDivisionError("division of a series by zero")
        inv = 1 / (Fraction(other) if isinstance(other, int) else other)
        return self * inv

    def __rtruediv__(self, other) -> Series:
        return self._lift(other) * self.reciprocal()

    def __pow__(self, n: int) -> Series:
        result = Series.constant(self.nvars, self.order, 1)
        for _ in range(n):
            result = result * self
        return result

    def compose(self, args: Sequence[Series]) -> Series:
        """Substitute series for the displacement variables (constant terms of ``args`` must vanish)."""
        if len(args) != self.nvars:
            raise ValueError("need one argument series per variable")
        if not args:
            return self
        order = min(a.order for a in args)
        nv = args[0].nvars
        for a in args:
            if a.value != 0:
                raise ValueError("composition needs arguments without constant terms")
        powers: dict[tuple[int, int], Series] = {}

        def power(i, k):
            if (i, k) not in powers:
                powers[(i, k)] = Series.constant(nv, order, 1) if k == 0 else power(i, k - 1) * args[i]
            return powers[(i, k)]

        out = Series(nv, order)
        for alpha, c in self.coeffs.items():
            if sum(alpha) > order:
                continue
            term = Series.constant(nv, order, c)
            for i, k in enumerate(alpha):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def __repr__(self):
        return f"Series(order={self.order}, {dict(sorted(self.coeffs.items()))})"


def jet_from_series(series: Sequence[Series], order: int) -> dict[tuple[int, ...], Scalar]:
    """Rebuild derivative tables of a potential from the series of its first derivatives.

    ``series[i]`` is the expansion of ``d f / d x_i``; entry ``alpha`` (|alpha| >= 1)
    is read from the first variable with a positive count.
    """
    nvars = len(series)
    out = {}
    for alpha in multi_indices(nvars, order):
        if sum(alpha) == 0:
            continue
        i = next(j for j, a in enumerate(alpha) if a)
        rest = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
        out[alpha] = series[i].derivative_at(rest)
    return out
