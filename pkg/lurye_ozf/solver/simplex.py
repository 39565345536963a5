"""Dense-tableau two-phase simplex for ``min c.x`` subject to
``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

Pivoting starts with Dantzig's rule and falls back to Bland's rule after a
run of degenerate pivots, which rules out cycling.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from lurye_ozf.core.exceptions import LPNumericalFailure

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: Optional[np.ndarray]
    fun: Optional[float]
    iterations: int
    bland: bool = False

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL


class TwoPhaseSimplex:
    def __init__(self, tol: float = 1e-9, max_iter: int = 20000, stall_limit: int = 50):
        self.tol = tol
        self.max_iter = max_iter
        self.stall_limit = stall_limit
        self.iterations = 0
        self.bland = False

    def solve(self, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None) -> LPResult:
        c = np.asarray(c, dtype=float)
        n = c.size
        A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
        b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
        A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
        m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
        m = m_ub + m_eq
        self.iterations = 0
        self.bland = False

        # column layout: x | slacks | artificials
        rows = np.zeros((m, n + m_ub))
        rows[:m_ub, :n] = A_ub
        rows[:m_ub, n:] = np.eye(m_ub)
        rows[m_ub:, :n] = A_eq
        rhs = np.concatenate([b_ub, b_eq])
        needs_artificial = []
        basis: List[int] = [-1] * m
        for i in range(m):
            if rhs[i] < 0:
                rows[i] *= -1.0
                rhs[i] *= -1.0
            if i < m_ub and rows[i, n + i] > 0:
                basis[i] = n + i
            else:
                needs_artificial.append(i)
        n_art = len(needs_artificial)
        first_art = n + m_ub
        T = np.zeros((m + 1, first_art + n_art + 1))
        T[:m, :first_art] = rows
        T[:m, -1] = rhs
        for k, i in enumerate(needs_artificial):
            T[i, first_art + k] = 1.0
            basis[i] = first_art + k

        if n_art:
            for i in needs_artificial:
                T[-1, :first_art] -= T[i, :first_art]
                T[-1, -1] -= T[i, -1]
            self._iterate(T, basis, first_art + n_art)
            infeasibility = -T[-1, -1]
            scale = max(1.0, float(np.max(np.abs(rhs))) if m else 1.0)
            if infeasibility > self.tol * scale * 10:
                logger.debug(f"phase 1 ended at infeasibility {infeasibility:.3e}")
                return LPResult(INFEASIBLE, None, None, self.iterations, self.bland)
            T, basis = self._drive_out(T, basis, first_art)

        T = np.delete(T, np.s_[first_art:T.shape[1] - 1], axis=1)
        cost = np.concatenate([c, np.zeros(m_ub)])
        T[-1, :] = 0.0
        T[-1, :first_art] = cost
        for i, j in enumerate(basis):
            if cost[j] != 0.0:
                T[-1] -= cost[j] * T[i]
        if not self._iterate(T, basis, first_art):
            return LPResult(UNBOUNDED, None, None, self.iterations, self.bland)
        x = np.zeros(first_art)
        for i, j in enumerate(basis):
            x[j] = T[i, -1]
        x = np.maximum(x[:n], 0.0)
        return LPResult(OPTIMAL, x, float(c @ x), self.iterations, self.bland)

    def _iterate(self, T: np.ndarray, basis: List[int], n_cols: int) -> bool:
        """Pivot to optimality over the first ``n_cols`` columns; False if unbounded."""
        stalled = 0
        while True:
            col = self._enter(T[-1, :n_cols])
            if col < 0:
                return True
            row = self._leave(T, col, basis)
            if row < 0:
                return False
            if T[row, -1] <= self.tol:
                stalled += 1
                if stalled > self.stall_limit and not self.bland:
                    logger.warning(f"{stalled} degenerate pivots in a row, switching to Bland's rule")
                    self.bland = True
            else:
                stalled = 0
            self._pivot(T, row, col)
            basis[row] = col
            self.iterations += 1
            if self.iterations > self.max_iter:
                raise LPNumericalFailure(f"simplex exceeded {self.max_iter} pivots")

    def _enter(self, z_row: np.ndarray) -> int:
        if self.bland:
            candidates = np.flatnonzero(z_row < -self.tol)
            return int(candidates[0]) if candidates.size else -1
        j = int(np.argmin(z_row)) if z_row.size else -1
        return j if j >= 0 and z_row[j] < -self.tol else -1

    def _leave(self, T: np.ndarray, col: int, basis: List[int]) -> int:
        best, best_ratio = -1, np.inf
        for i in range(T.shape[0] - 1):
            a = T[i, col]
            if a > self.tol:
                ratio = T[i, -1] / a
                if ratio < best_ratio - self.tol or (abs(ratio - best_ratio) <= self.tol and basis[i] < basis[best]):
                    best, best_ratio = i, ratio
        return best

    @staticmethod
    def _pivot(T: np.ndarray, row: int, col: int):
        T[row, :] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row, :])

    def _drive_out(self, T: np.ndarray, basis: List[int], first_art: int):
        redundant = []
        for i, j in enumerate(basis):
            if j < first_art:
                continue
            candidates = np.flatnonzero(np.abs(T[i, :first_art]) > self.tol)
            if candidates.size:
                col = int(candidates[0])
                self._pivot(T, i, col)
                basis[i] = col
            else:
                redundant.append(i)
        if redundant:
            logger.debug(f"dropping {len(redundant)} redundant equality rows")
            T = np.delete(T, redundant, axis=0)
            basis = [j for i, j in enumerate(basis) if i not in redundant]
        return T, basis
