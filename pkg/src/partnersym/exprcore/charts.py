"""Coordinate charts, points and affine linear forms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .scalars import ZERO, Scalar, all_exact, format_scalar, scalar


class ChartError(ValueError):
    """Unknown variable name or mismatched coordinate chart."""


@dataclass(frozen=True)
class Chart:
    name: str
    variables: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ChartError(f"repeated variable in chart {self.name}")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise ChartError(f"variable {var!r} not in chart {self.name} {self.variables}") from None

    def __contains__(self, var) -> bool:
        return var in self.variables

    def __str__(self):
        return f"{self.name}({','.join(self.variables)})"


TXYZ = Chart("txyz", ("t", "x", "y", "z"))
TPQY = Chart("tpqy", ("t", "p", "q", "y"))
ETA_XI = Chart("etaxiqy", ("eta", "xi", "q", "y"))
TPYZ = Chart("tpyz", ("t", "p", "y", "z"))
STY = Chart("sty", ("s", "t", "y"))
RTY = Chart("rty", ("r", "t", "y"))

CHARTS: dict[str, Chart] = {c.name: c for c in (TXYZ, TPQY, ETA_XI, TPYZ, STY, RTY)}


def get_chart(chart) -> Chart:
    if isinstance(chart, Chart):
        return chart
    try:
        return CHARTS[chart]
    except KeyError:
        raise ChartError(f"unknown chart {chart!r}; known: {sorted(CHARTS)}") from None


def require_same_chart(a: Chart, b: Chart) -> None:
    if a != b:
        raise ChartError(f"chart mismatch: {a} vs {b}")


@dataclass(frozen=True)
class Point:
    chart: Chart
    coords: tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.coords) != self.chart.dim:
            raise ChartError(f"point needs {self.chart.dim} coordinates for chart {self.chart}")

    @classmethod
    def of(cls, chart, *coords, **named) -> Point:
        chart = get_chart(chart)
        if named:
            if coords:
                raise TypeError("give coordinates positionally or by name, not both")
            missing = set(chart.variables) - set(named)
            if missing:
                raise ChartError(f"missing coordinates {sorted(missing)}")
            coords = [named[v] for v in chart.variables]
        return cls(chart, tuple(scalar(c) for c in coords))

    @classmethod
    def origin(cls, chart) -> Point:
        chart = get_chart(chart)
        return cls(chart, (ZERO,) * chart.dim)

    @property
    def exact(self) -> bool:
        return all_exact(self.coords)

    def __getitem__(self, var: str) -> Scalar:
        return self.coords[self.chart.index(var)]

    def as_dict(self) -> dict[str, Scalar]:
        return dict(zip(self.chart.variables, self.coords))


@dataclass(frozen=True)
class LinearForm:
    """``sum_i coeffs[i] * chart.variables[i] + const``."""

    chart: Chart
    coeffs: tuple[Scalar, ...]
    const: Scalar = ZERO

    def __post_init__(self):
        if len(self.coeffs) != self.chart.dim:
            raise ChartError("linear form length does not match chart")

    @classmethod
    def from_dict(cls, chart, coeffs: Mapping[str, object], const=0) -> LinearForm:
        chart = get_chart(chart)
        for name in coeffs:
            chart.index(name)
        return cls(chart, tuple(scalar(coeffs.get(v, 0)) for v in chart.variables), scalar(const))

    @classmethod
    def variable(cls, chart, var: str) -> LinearForm:
        chart = get_chart(chart)
        return cls.from_dict(chart, {var: 1})

    @classmethod
    def constant(cls, chart, value) -> LinearForm:
        chart = get_chart(chart)
        return cls(chart, (ZERO,) * chart.dim, scalar(value))

    def is_zero(self) -> bool:
        return self.const == 0 and all(c == 0 for c in self.coeffs)

    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def coeff(self, var: str) -> Scalar:
        return self.coeffs[self.chart.index(var)]

    def __add__(self, other: LinearForm) -> LinearForm:
        require_same_chart(self.chart, other.chart)
        return LinearForm(self.chart, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                          self.const + other.const)

    def __neg__(self) -> LinearForm:
        return LinearForm(self.chart, tuple(-a for a in self.coeffs), -self.const)

    def __sub__(self, other: LinearForm) -> LinearForm:
        return self + (-other)

    def scale(self, k: Scalar) -> LinearForm:
        return LinearForm(self.chart, tuple(k * a for a in self.coeffs), k * self.const)

    def evaluate(self, point: Point) -> Scalar:
        require_same_chart(self.chart, point.chart)
        total = self.const
        for a, x in zip(self.coeffs, point.coords):
            if a != 0:
                total = total + a * x
        return total

    def leading_sign(self) -> int:
        """Sign of the first nonzero entry of (coeffs..., const); 0 for the zero form."""
        for c in (*self.coeffs, self.const):
            if c != 0:
                return 1 if c > 0 else -1
        return 0

    @property
    def exact(self) -> bool:
        return all_exact(self.coeffs) and all_exact([self.const])

    def to_text(self) -> str:
        parts: list[tuple[Scalar, str]] = [
            (c, v) for c, v in zip(self.coeffs, self.chart.variables) if c != 0
        ]
        if self.const != 0 or not parts:
            parts.append((self.const, ""))
        return join_signed(parts)

    def __str__(self):
        return self.to_text()


def join_signed(parts: Sequence[tuple[Scalar, str]]) -> str:
    """Render ``[(coef, body), ...]`` as ``a*body + b*body - ...``."""
    out = []
    for i, (coef, body) in enumerate(parts):
        negative = coef < 0
        mag = -coef if negative else coef
        if body and mag == 1:
            text = body
        elif body:
            text = f"{format_scalar(mag)}*{body}"
        else:
            text = format_scalar(mag)
        if i == 0:
            out.append(f"-{text}" if negative else text)
        else:
            out.append(f" - {text}" if negative else f" + {text}")
    return "".join(out)
