"""Exact Gauss-Jordan elimination over Q, fed one equation at a time."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class InconsistentSystem(ValueError):
    pass


class IncrementalSystem:
    """Linear system A x = b over Q kept in reduced row echelon form.

    Equations are added one by one so callers can tell exactly which equation
    first made the system inconsistent.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: list[tuple[int, list[Fraction], Fraction]] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def add_equation(self, coeffs: Sequence, rhs) -> bool:
        """Add one equation; return False if it contradicts the previous ones."""
        row = [Fraction(c) for c in coeffs]
        b = Fraction(rhs)
        if len(row) != self.ncols:
            raise ValueError("equation has the wrong number of coefficients")
        for pivot, prow, pb in self._rows:
            f = row[pivot]
            if f:
                for j in range(self.ncols):
                    if prow[j]:
                        row[j] -= f * prow[j]
                b -= f * pb
        pivot = next((j for j, c in enumerate(row) if c), None)
        if pivot is None:
            return b == 0
        inv = 1 / row[pivot]
        row = [c * inv for c in row]
        b *= inv
        reduced = []
        for p, prow, pb in self._rows:
            f = prow[pivot]
            if f:
                prow = [x - f * y for x, y in zip(prow, row)]
                pb = pb - f * b
            reduced.append((p, prow, pb))
        reduced.append((pivot, row, b))
        reduced.sort(key=lambda item: item[0])
        self._rows = reduced
        return True

    def unique_solution(self) -> list[Fraction] | None:
        if self.rank < self.ncols:
            return None
        x = [Fraction(0)] * self.ncols
        for pivot, _, b in self._rows:
            x[pivot] = b
        return x


def solve_exact(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Unique solution of a consistent square-or-tall system, None if underdetermined.

    Raises InconsistentSystem when no solution exists.
    """
    if not matrix:
        return []
    system = IncrementalSystem(len(matrix[0]))
    for i, (row, b) in enumerate(zip(matrix, rhs)):
        if not system.add_equation(row, b):
            raise InconsistentSystem(f"equation {i} is inconsistent with the preceding ones")
    return system.unique_solution()
