"""Exact closed-class expressions, charts, points and jet tables."""

from .charts import (CHARTS, ETA_XI, RTY, STY, TPQY, TPYZ, TXYZ, Chart, ChartError,
                     LinearForm, Point, get_chart)
from .expression import (Expression, IntegrationError, LinearMap, NotLinearError,
                         change_vars_linear, derivative, differentiate)
from .jets import MAX_JET_ORDER, JetOrderError, JetTable, jet, multi_indices, split_names
from .parsing import ParseError, parse_expression
from .scalars import Scalar, exact_sqrt, format_scalar, is_exact, scalar

__all__ = [
    "CHARTS", "ETA_XI", "RTY", "STY", "TPQY", "TPYZ", "TXYZ", "Chart", "ChartError",
    "LinearForm", "Point", "get_chart", "Expression", "IntegrationError", "LinearMap",
    "NotLinearError", "change_vars_linear", "derivative", "differentiate", "MAX_JET_ORDER",
    "JetOrderError", "JetTable", "jet", "multi_indices", "split_names", "ParseError",
    "parse_expression", "Scalar", "exact_sqrt", "format_scalar", "is_exact", "scalar",
]
