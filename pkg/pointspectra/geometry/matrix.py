"""
Exact dense linear algebra over Q(sqrt d).

Matrices are plain lists of rows of QuadScalar. Everything here is
fraction-free or pivoted Gaussian elimination; nothing is rounded.
"""
from __future__ import annotations

from typing import Sequence

from pointspectra.errors import RankDeficientError, ShapeMismatchError
from pointspectra.geometry.scalar import QuadScalar

Matrix = list[list[QuadScalar]]


def field_of(matrix: Sequence[Sequence[QuadScalar]], default: int = 1) -> int:
    for row in matrix:
        for entry in row:
            if isinstance(entry, QuadScalar) and entry.d != 1:
                return entry.d
    return default


def identity(size: int, d: int = 1) -> Matrix:
    return [
        [QuadScalar.one(d) if i == j else QuadScalar.zero(d) for j in range(size)]
        for i in range(size)
    ]


def copy(matrix: Sequence[Sequence[QuadScalar]], d: int) -> Matrix:
    return [[QuadScalar.coerce(entry, d) for entry in row] for row in matrix]


def transpose(matrix: Sequence[Sequence[QuadScalar]]) -> Matrix:
    return [list(column) for column in zip(*matrix)]


def matmul(left: Sequence[Sequence[QuadScalar]], right: Sequence[Sequence[QuadScalar]]) -> Matrix:
    if left and len(left[0]) != len(right):
        raise ShapeMismatchError(
            f"cannot multiply {len(left)}x{len(left[0])} by {len(right)}x{len(right[0]) if right else 0}"
        )
    d = field_of(left, field_of(right))
    columns = transpose(right)
    result = []
    for row in left:
        out = []
        for column in columns:
            total = QuadScalar.zero(d)
            for x, y in zip(row, column):
                if x and y:
                    total = total + x * y
            out.append(total)
        result.append(out)
    return result


def matvec(matrix: Sequence[Sequence[QuadScalar]], vector: Sequence[QuadScalar]) -> list[QuadScalar]:
    return [row[0] for row in matmul(matrix, [[x] for x in vector])]


def determinant(matrix: Sequence[Sequence[QuadScalar]]) -> QuadScalar:
    """
    Bareiss fraction-free elimination with row pivoting.
    """
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise ShapeMismatchError("determinant of a non-square matrix")
    d = field_of(matrix)
    if size == 0:
        return QuadScalar.one(d)
    work = copy(matrix, d)
    sign = 1
    previous = QuadScalar.one(d)
    for k in range(size - 1):
        pivot_row = next((i for i in range(k, size) if work[i][k]), None)
        if pivot_row is None:
            return QuadScalar.zero(d)
        if pivot_row != k:
            work[k], work[pivot_row] = work[pivot_row], work[k]
            sign = -sign
        pivot = work[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                work[i][j] = (work[i][j] * pivot - work[i][k] * work[k][j]) / previous
            work[i][k] = QuadScalar.zero(d)
        previous = pivot
    value = work[size - 1][size - 1]
    return value if sign > 0 else -value


def row_echelon(matrix: Sequence[Sequence[QuadScalar]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    d = field_of(matrix)
    work = copy(matrix, d)
    pivots: list[int] = []
    row = 0
    columns = len(work[0]) if work else 0
    for col in range(columns):
        pivot_row = next((i for i in range(row, len(work)) if work[i][col]), None)
        if pivot_row is None:
            continue
        work[row], work[pivot_row] = work[pivot_row], work[row]
        pivot = work[row][col]
        work[row] = [entry / pivot for entry in work[row]]
        for i in range(len(work)):
            if i != row and work[i][col]:
                factor = work[i][col]
                work[i] = [a - factor * b for a, b in zip(work[i], work[row])]
        pivots.append(col)
        row += 1
        if row == len(work):
            break
    return work, pivots


def rank(matrix: Sequence[Sequence[QuadScalar]]) -> int:
    if not matrix or not matrix[0]:
        return 0
    return len(row_echelon(matrix)[1])


def psd_rank(matrix: Sequence[Sequence[QuadScalar]]) -> int | None:
    """
    Rank of a symmetric matrix if it is positive semidefinite, else None.

    Symmetric elimination with positive diagonal pivots: a PSD matrix whose
    remaining diagonal is zero must be zero in that block.
    """
    d = field_of(matrix)
    work = copy(matrix, d)
    active = list(range(len(work)))
    found = 0
    while active:
        diagonal = [(work[i][i], i) for i in active]
        if any(value.sign() < 0 for value, _ in diagonal):
            return None
        positive = [i for value, i in diagonal if value.sign() > 0]
        if not positive:
            if any(work[i][j] for i in active for j in active):
                return None
            break
        k = positive[0]
        pivot = work[k][k]
        active.remove(k)
        for i in active:
            if not work[i][k]:
                continue
            factor = work[i][k] / pivot
            for j in active:
                work[i][j] = work[i][j] - factor * work[k][j]
        found += 1
    return found


def solve(matrix: Sequence[Sequence[QuadScalar]], rhs: Sequence[QuadScalar]) -> list[QuadScalar]:
    """Unique solution of a square non-singular system."""
    size = len(matrix)
    augmented = [list(row) + [value] for row, value in zip(matrix, rhs)]
    reduced, pivots = row_echelon(augmented)
    if pivots != list(range(size)):
        raise RankDeficientError("linear system is singular")
    return [reduced[i][size] for i in range(size)]


def inverse(matrix: Sequence[Sequence[QuadScalar]]) -> Matrix:
    size = len(matrix)
    d = field_of(matrix)
    augmented = [list(row) + unit for row, unit in zip(copy(matrix, d), identity(size, d))]
    reduced, pivots = row_echelon(augmented)
    if pivots[:size] != list(range(size)):
        raise RankDeficientError("matrix is singular")
    return [row[size:] for row in reduced]
