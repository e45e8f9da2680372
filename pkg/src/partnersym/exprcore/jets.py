"""Tables of partial derivatives of a potential at a point."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterator, Mapping

from .charts import Chart, ChartError, Point, require_same_chart
from .expression import Expression
from .scalars import Scalar, all_exact

MAX_JET_ORDER = 4


class JetOrderError(ValueError):
    pass


def multi_indices(dim: int, order: int) -> Iterator[tuple[int, ...]]:
    """All derivative-count tuples of total order <= ``order``, graded."""
    for k in range(order + 1):
        for combo in combinations_with_replacement(range(dim), k):
            counts = [0] * dim
            for i in combo:
                counts[i] += 1
            yield tuple(counts)


@dataclass(frozen=True)
class JetTable:
    """Derivatives keyed by per-variable counts, e.g. ``(1, 1, 0, 0)`` is d^2/dt dx."""

    chart: Chart
    point: Point
    order: int
    entries: Mapping[tuple[int, ...], Scalar] = field(repr=False)

    def counts(self, names) -> tuple[int, ...]:
        if isinstance(names, tuple) and all(isinstance(n, int) for n in names):
            if len(names) != self.chart.dim:
                raise ChartError("count tuple length does not match chart")
            return names
        if isinstance(names, str):
            names = split_names(names, self.chart)
        counts = [0] * self.chart.dim
        for n in names:
            counts[self.chart.index(n)] += 1
        return tuple(counts)

    def __getitem__(self, names) -> Scalar:
        key = self.counts(names)
        if sum(key) > self.order:
            raise JetOrderError(f"derivative of order {sum(key)} not in a jet of order {self.order}")
        return self.entries[key]

    def d(self, *names: str) -> Scalar:
        return self[tuple(names)]

    @property
    def value(self) -> Scalar:
        return self.entries[(0,) * self.chart.dim]

    @property
    def exact(self) -> bool:
        return all_exact(self.entries.values())

    def truncate(self, order: int) -> JetTable:
        return JetTable(self.chart, self.point, order,
                        {k: v for k, v in self.entries.items() if sum(k) <= order})


def split_names(text: str, chart: Chart) -> list[str]:
    """Split ``"txx"`` or ``"etaxi"`` into chart variable names (longest match first)."""
    names = sorted(chart.variables, key=len, reverse=True)
    out = []
    i = 0
    while i < len(text):
        for n in names:
            if text.startswith(n, i):
                out.append(n)
                i += len(n)
                break
        else:
            raise ChartError(f"cannot split {text!r} into variables of {chart}")
    return out


def jet(e: Expression, point: Point, order: int) -> JetTable:
    """Every partial derivative of ``e`` up to ``order`` (<= 4) evaluated at ``point``."""
    require_same_chart(e.chart, point.chart)
    if not 0 <= order <= MAX_JET_ORDER:
        raise JetOrderError(f"jet order must be in 0..{MAX_JET_ORDER}, got {order}")
    dim = e.chart.dim
    derivs: dict[tuple[int, ...], Expression] = {(0,) * dim: e}
    entries: dict[tuple[int, ...], Scalar] = {}
    for counts in multi_indices(dim, order):
        if counts not in derivs:
            # differentiate the parent obtained by removing one from the last nonzero slot
            i = max(j for j, c in enumerate(counts) if c)
            parent = counts[:i] + (counts[i] - 1,) + counts[i + 1:]
            derivs[counts] = derivs[parent].diff(e.chart.variables[i])
        entries[counts] = derivs[counts].evaluate(point)
    return JetTable(e.chart, point, order, entries)
