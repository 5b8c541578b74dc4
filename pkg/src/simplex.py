"""Dense primal simplex for small equality-constrained linear programs."""
import dataclasses
from typing import List, Optional, Sequence

import numpy as np

from src.exceptions import NumericalException
from src.logger import init_logger

logger = init_logger()


@dataclasses.dataclass(frozen=True)
class SimplexResult:
    """Optimal basic solution."""

    x: np.ndarray
    value: float
    basis: List[int]
    iterations: int


class DenseSimplex:
    """
    Maximize c.x subject to A x = b, x >= 0, starting from a feasible basis.

    Pivots follow Bland's rule: the entering column is the lowest index with a
    positive reduced cost, and ratio-test ties leave by the lowest basic index.
    The rule cannot cycle, so every run is deterministic and finite.
    """

    max_iterations: int = 10_000
    tolerance: float = 1e-11

    def __init__(
        self,
        c: np.ndarray,
        a_eq: np.ndarray,
        b_eq: np.ndarray,
        basis: Sequence[int],
    ):
        """
        Initialize the DenseSimplex instance.

        :param c: Objective coefficients, shape (k,).
        :type c: np.ndarray
        :param a_eq: Constraint matrix, shape (m, k).
        :type a_eq: np.ndarray
        :param b_eq: Right-hand side, shape (m,).
        :type b_eq: np.ndarray
        :param basis: m column indices forming a nonsingular, primal feasible basis.
        :type basis: Sequence[int]
        """
        self.c = np.asarray(c, dtype=float)
        self.a_eq = np.asarray(a_eq, dtype=float)
        self.b_eq = np.asarray(b_eq, dtype=float)
        self.basis = list(basis)

        rows, columns = self.a_eq.shape
        if self.c.shape != (columns,) or self.b_eq.shape != (rows,):
            raise NumericalException(
                f"Inconsistent LP shapes: c {self.c.shape}, A {self.a_eq.shape}, b {self.b_eq.shape}"
            )
        if len(self.basis) != rows or len(set(self.basis)) != rows:
            raise NumericalException(f"Basis must hold {rows} distinct columns: {self.basis}")
        if np.any(self._basic_solution() < -self.tolerance):
            raise NumericalException("Starting basis is not primal feasible")

    def run_simplex(self) -> SimplexResult:
        """
        Pivot until no column improves the objective.

        :raises NumericalException: If the program is unbounded or the iteration
            cap is reached.
        :return: The optimal basic solution.
        :rtype: SimplexResult
        """
        for iteration in range(self.max_iterations):
            x_basic = self._basic_solution()
            entering = self._entering_column()
            if entering is None:
                return self._result(x_basic, iteration)
            leaving = self._leaving_row(x_basic, entering)
            if leaving is None:
                raise NumericalException(f"LP is unbounded along column {entering}")
            self.basis[leaving] = entering

        raise NumericalException(f"Simplex did not converge in {self.max_iterations} pivots")

    def _basis_matrix(self) -> np.ndarray:
        return self.a_eq[:, self.basis]

    def _basic_solution(self) -> np.ndarray:
        """Values of the basic variables."""
        try:
            return np.linalg.solve(self._basis_matrix(), self.b_eq)
        except np.linalg.LinAlgError as error:
            raise NumericalException(f"Singular basis {self.basis}") from error

    def _entering_column(self) -> Optional[int]:
        """
        Lowest-index column with a positive reduced cost.

        :return: The column index, or None at optimality.
        :rtype: Optional[int]
        """
        duals = np.linalg.solve(self._basis_matrix().T, self.c[self.basis])
        reduced = self.c - self.a_eq.T @ duals
        reduced[self.basis] = 0.0
        candidates = np.flatnonzero(reduced > self.tolerance)
        return int(candidates[0]) if candidates.size else None

    def _leaving_row(self, x_basic: np.ndarray, entering: int) -> Optional[int]:
        """
        Row of the basic variable leaving the basis by the ratio test.

        :param x_basic: Current basic solution.
        :type x_basic: np.ndarray
        :param entering: Entering column.
        :type entering: int
        :return: The row, or None when the column is unbounded.
        :rtype: Optional[int]
        """
        direction = np.linalg.solve(self._basis_matrix(), self.a_eq[:, entering])
        rows = np.flatnonzero(direction > self.tolerance)
        if rows.size == 0:
            return None
        ratios = np.maximum(x_basic[rows], 0.0) / direction[rows]
        best = ratios.min()
        tied = rows[ratios <= best + self.tolerance]
        return int(min(tied, key=lambda row: self.basis[row]))

    def _result(self, x_basic: np.ndarray, iterations: int) -> SimplexResult:
        x = np.zeros(self.c.size)
        x[self.basis] = np.maximum(x_basic, 0.0)
        logger.debug("Simplex optimal after %d pivots", iterations)
        return SimplexResult(
            x=x,
            value=float(self.c @ x),
            basis=list(self.basis),
            iterations=iterations,
        )
