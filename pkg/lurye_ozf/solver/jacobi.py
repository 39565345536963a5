"""Cyclic Jacobi eigensolver for real symmetric matrices."""

import logging
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)


def jacobi_eigh(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and column eigenvectors of symmetric ``A``."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1e-300)
    for sweep in range(max_sweeps):
        off = np.sqrt(max(np.sum(A * A) - np.sum(np.diag(A) ** 2), 0.0))
        if off <= tol * scale:
            logger.debug(f"jacobi converged after {sweep} sweeps (n={n})")
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < tol * scale / n:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0.0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                _rotate(A, p, q, c, s)
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        logger.warning(f"jacobi hit {max_sweeps} sweeps without reaching tolerance {tol}")
    eigvals = np.diag(A).copy()
    order = np.argsort(eigvals, kind="stable")
    return eigvals[order], V[:, order]


def _rotate(A: np.ndarray, p: int, q: int, c: float, s: float):
    ap, aq = A[:, p].copy(), A[:, q].copy()
    A[:, p] = c * ap - s * aq
    A[:, q] = s * ap + c * aq
    rp, rq = A[p, :].copy(), A[q, :].copy()
    A[p, :] = c * rp - s * rq
    A[q, :] = s * rp + c * rq


def max_eig(A: np.ndarray, tol: float = 1e-12) -> Tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector for it."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return -np.inf, np.zeros(0)
    eigvals, V = jacobi_eigh(A, tol=tol)
    return float(eigvals[-1]), V[:, -1]
