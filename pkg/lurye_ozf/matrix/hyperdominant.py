"""Doubly hyperdominant and doubly stochastic matrices, Birkhoff-von Neumann
decomposition, and the conic ``sum beta_i (I - P_i)`` parameterization."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from lurye_ozf.core.exceptions import (
    DecompositionStalled,
    DimensionMismatch,
    NotDoublyStochastic,
    NotHyperdominant,
    NotZeroExcess,
)
from lurye_ozf.signal.signals import Signal
from lurye_ozf.solver.matching import support_permutation

logger = logging.getLogger(__name__)

CLASS_TOL = 1e-9
RECON_TOL = 1e-8
ENTRY_FLOOR = 1e-12

Permutation = Tuple[int, ...]


@dataclass(frozen=True)
class MatrixClass:
    hyperdominant: bool
    zero_excess: bool
    doubly_stochastic: bool

    def to_json(self) -> dict:
        return {
            "hyperdominant": self.hyperdominant,
            "zero_excess": self.zero_excess,
            "doubly_stochastic": self.doubly_stochastic,
        }


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    """``P[i, perm[i]] = 1``, so ``(P u)_i = u_{perm[i]}``."""
    n = len(perm)
    P = np.zeros((n, n))
    P[np.arange(n), list(perm)] = 1.0
    return P


@dataclass(frozen=True)
class PermutationCombo:
    terms: Tuple[Tuple[float, Permutation], ...] = ()

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def total_weight(self) -> float:
        return float(sum(w for w, _ in self.terms))

    def convex_sum(self, n: int) -> np.ndarray:
        """``sum w_i P_i``."""
        out = np.zeros((n, n))
        for weight, perm in self.terms:
            out += weight * permutation_matrix(perm)
        return out

    def conic_sum(self, n: int) -> np.ndarray:
        """``sum beta_i (I - P_i)``."""
        out = np.zeros((n, n))
        for beta, perm in self.terms:
            out += beta * (np.eye(n) - permutation_matrix(perm))
        return out

    def to_json(self) -> List[dict]:
        return [{"weight": w, "perm": list(p)} for w, p in self.terms]

    @classmethod
    def from_json(cls, data: List[dict]) -> "PermutationCombo":
        return cls(tuple((float(t["weight"]), tuple(int(x) for x in t["perm"])) for t in data))


def as_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DimensionMismatch("matrix has non-finite entries")
    return M


def classify(M) -> MatrixClass:
    M = as_square(M)
    off = M - np.diag(np.diag(M))
    rows, cols = M.sum(axis=1), M.sum(axis=0)
    hyper = bool(np.all(off <= 0.0) and np.all(rows >= -CLASS_TOL) and np.all(cols >= -CLASS_TOL))
    zero_excess = hyper and bool(np.all(np.abs(rows) <= CLASS_TOL) and np.all(np.abs(cols) <= CLASS_TOL))
    stochastic = bool(
        np.all(M >= 0.0) and np.all(np.abs(rows - 1.0) <= CLASS_TOL) and np.all(np.abs(cols - 1.0) <= CLASS_TOL)
    )
    return MatrixClass(hyper, zero_excess, stochastic)


def augment_zero_excess(M) -> np.ndarray:
    """Border ``M`` with its negated row/column sums; the result has zero excess."""
    M = as_square(M)
    if not classify(M).hyperdominant:
        raise NotHyperdominant()
    n = M.shape[0]
    out = np.zeros((n + 1, n + 1))
    out[:n, :n] = M
    out[:n, n] = -M.sum(axis=1)
    out[n, :n] = -M.sum(axis=0)
    out[n, n] = M.sum()
    return out


def birkhoff_decompose(A) -> PermutationCombo:
    A = as_square(A)
    if not classify(A).doubly_stochastic:
        raise NotDoublyStochastic()
    return PermutationCombo(_peel_permutations(A))


def _peel_permutations(A: np.ndarray) -> Tuple[Tuple[float, Permutation], ...]:
    n = A.shape[0]
    residual = np.where(A > ENTRY_FLOOR, A, 0.0)
    weights: Dict[Permutation, float] = {}
    while np.any(residual > 0.0):
        perm = support_permutation(residual)
        if perm is None:
            remaining = residual.sum() / n
            if remaining > RECON_TOL:
                raise DecompositionStalled(f"residual mass {remaining:.3e} has no permutation in its support")
            break
        rows = np.arange(n)
        weight = float(residual[rows, perm].min())
        residual[rows, perm] -= weight
        residual[residual < ENTRY_FLOOR] = 0.0
        key = tuple(perm)
        weights[key] = weights.get(key, 0.0) + weight
    logger.debug(f"birkhoff: {len(weights)} permutations for n={n}")
    return tuple((w, p) for p, w in weights.items())


def conic_decompose(M) -> PermutationCombo:
    """``M = sum beta_i (I - P_i)`` for a zero-excess doubly hyperdominant ``M``.

    With ``d = max |m_ij|`` the matrix ``I - M/d`` is doubly stochastic; its
    Birkhoff terms scaled by ``d`` give the betas. The identity is dropped.
    """
    M = as_square(M)
    cls = classify(M)
    if not cls.hyperdominant:
        raise NotHyperdominant()
    if not cls.zero_excess:
        raise NotZeroExcess()
    d = float(np.max(np.abs(M))) if M.size else 0.0
    if d == 0.0:
        return PermutationCombo()
    n = M.shape[0]
    identity = tuple(range(n))
    terms = tuple((d * w, p) for w, p in _peel_permutations(np.eye(n) - M / d) if p != identity)
    return PermutationCombo(terms)


def bilinear_form(M, v: Signal, w: Signal) -> float:
    """``<M v, w> = sum_ij m_ij v_j w_i`` with signals indexed ``0..n-1``."""
    M = as_square(M)
    n = M.shape[0]
    for name, s in (("v", v), ("w", w)):
        if not s.is_zero and (s.start < 0 or s.end > n):
            raise DimensionMismatch(f"{name} support [{s.start}, {s.end}) does not fit n={n}")
    return float(w.window(0, n) @ M @ v.window(0, n))


def matrix_to_json(M) -> dict:
    M = as_square(M)
    return {"n": M.shape[0], "entries": M.tolist()}


def matrix_from_json(data: dict) -> np.ndarray:
    M = as_square(data["entries"])
    if "n" in data and int(data["n"]) != M.shape[0]:
        raise DimensionMismatch(f"declared n={data['n']} but entries are {M.shape[0]}x{M.shape[0]}")
    return M
