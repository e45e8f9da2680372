"""Small dense linear algebra over any field-like element type.

Works for ``Fraction`` (exact), ``float`` and the truncated Taylor series of
:mod:`partnersym.taylor` (pivoting looks at the constant term).  Matrices
are plain lists of rows; sizes here never exceed 4x4.
"""

from __future__ import annotations


class SingularMatrixError(ArithmeticError):
    pass


def _magnitude(x) -> float:
    value = getattr(x, "value", x)
    return abs(float(value))


def _is_exact(x) -> bool:
    from fractions import Fraction

    value = getattr(x, "value", x)
    return isinstance(value, (Fraction, int))


def _eliminate(a: list[list], rhs: list[list]) -> list[list]:
    n = len(a)
    a = [list(row) for row in a]
    rhs = [list(row) for row in rhs]
    scale = max((_magnitude(x) for row in a for x in row), default=0.0)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: _magnitude(a[r][col]))
        mag = _magnitude(a[pivot][col])
        if mag == 0 or (not _is_exact(a[pivot][col]) and mag <= 1e-13 * scale):
            raise SingularMatrixError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        inv = 1 / a[col][col]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col] * inv
            if not hasattr(f, "value") and f == 0:
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            rhs[r] = [x - f * y for x, y in zip(rhs[r], rhs[col])]
        a[col] = [x * inv for x in a[col]]
        rhs[col] = [x * inv for x in rhs[col]]
    return rhs


def solve(a: list[list], b: list) -> list:
    """Solve ``a @ x = b`` for a square ``a``."""
    return [row[0] for row in _eliminate(a, [[v] for v in b])]


def inverse(a: list[list]) -> list[list]:
    n = len(a)
    one = 1
    ident = [[one if i == j else 0 for j in range(n)] for i in range(n)]
    return _eliminate(a, ident)


def det(a: list[list]):
    """Determinant by cofactor expansion (exact for Fractions, n <= 4 here)."""
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = 0
    for j in range(n):
        if not hasattr(a[0][j], "value") and a[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def matmul(a: list[list], b: list[list]) -> list[list]:
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), 0) for col in cols] for row in a]
