"""Finite-horizon quadratic forms over stacked ``(v, w)`` and a cutting-plane
search for nonnegative weights ``alpha`` with ``sigma0 + sum alpha_k sigma_k <= 0``."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from lurye_ozf.core.exceptions import HorizonNotMultipleOfPeriod, SlaterViolated, UnstablePlant
from lurye_ozf.matrix.periodic_banded import (
    BandedPeriodicPermutation,
    PeriodicBandedOperator,
    combine,
    enumerate_basis,
)
from lurye_ozf.signal.plant import RationalPlant
from lurye_ozf.signal.signals import SequencePair, Signal
from lurye_ozf.solver.jacobi import jacobi_eigh
from lurye_ozf.solver.simplex import TwoPhaseSimplex

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
CERT_TOL = 1e-8
EIG_TOL = 1e-10

FOUND = "found"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """``sigma(v, w) = f^T matrix f`` with ``f = (v_0..v_{H-1}, w_0..w_{H-1})``."""

    H: int
    matrix: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float)
        if A.shape != (2 * self.H, 2 * self.H):
            raise ValueError(f"form on horizon {self.H} needs a {2 * self.H}-square matrix, got {A.shape}")
        if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL:
            raise ValueError("quadratic form matrix is not symmetric")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @classmethod
    def identity(cls, H: int, scale: float = 1.0) -> "QuadraticForm":
        return cls(H, scale * np.eye(2 * H))

    def stack(self, p: SequencePair) -> np.ndarray:
        return np.concatenate([p.v.window(0, self.H), p.w.window(0, self.H)])

    def value(self, p: SequencePair) -> float:
        return self.evaluate(self.stack(p))

    def evaluate(self, f: np.ndarray) -> float:
        return float(f @ self.matrix @ f)

    def to_json(self) -> dict:
        return {"H": self.H, "matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticForm":
        return cls(int(data["H"]), np.asarray(data["matrix"], dtype=float))


def _blocks(vv: np.ndarray, vw: np.ndarray, ww: np.ndarray) -> np.ndarray:
    A = np.block([[vv, vw], [vw.T, ww]])
    return 0.5 * (A + A.T)


def build_sigma0(G: RationalPlant, gamma: float, H: int) -> QuadraticForm:
    """``||w||^2 - gamma^2 ||v - G w||^2``."""
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not G.is_stable():
        raise UnstablePlant()
    TG = G.toeplitz_truncation(H).entries
    g2 = gamma * gamma
    I = np.eye(H)
    return QuadraticForm(H, _blocks(-g2 * I, g2 * TG, I - g2 * TG.T @ TG))


def build_sigmak(C, H: int) -> QuadraticForm:
    """``<C v, w>`` for ``C = I - P`` (a permutation) or any periodic banded operator."""
    op = C.complement() if isinstance(C, BandedPeriodicPermutation) else C
    if H % op.T:
        raise HorizonNotMultipleOfPeriod(f"H={H} is not a multiple of T={op.T}")
    TC = op.truncation(H)
    return QuadraticForm(H, _blocks(np.zeros((H, H)), 0.5 * TC.T, np.zeros((H, H))))


def witness_signal(T: int) -> SequencePair:
    """``v_k = w_k = 1/(k+1)`` for ``k < T``."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    s = Signal.from_array(1.0 / np.arange(1, T + 1), 0)
    return SequencePair(s, s)


def basis_forms(T: int, B: int, H: int, cap: int = 10 ** 6) -> List[Tuple[BandedPeriodicPermutation, QuadraticForm]]:
    return [(perm, build_sigmak(perm, H)) for perm in enumerate_basis(T, B, cap) if not perm.is_identity]


def combined_matrix(sigma0: QuadraticForm, alpha: Sequence[float], sigmas: Sequence[QuadraticForm]) -> np.ndarray:
    Q = np.array(sigma0.matrix)
    for a, s in zip(alpha, sigmas):
        Q = Q + a * s.matrix
    return Q


def combined_max_eig(sigma0: QuadraticForm, alpha: Sequence[float], sigmas: Sequence[QuadraticForm]) -> float:
    if any(a < 0.0 for a in alpha):
        raise ValueError("weights must be nonnegative")
    eigvals, _ = jacobi_eigh(combined_matrix(sigma0, alpha, sigmas), tol=EIG_TOL)
    return float(eigvals[-1])


@dataclass(frozen=True)
class CertificateConfig:
    max_iter: int = 500
    alpha_max: float = 1e3
    tol: float = CERT_TOL
    cuts_per_iter: int = 3
    regularizer: float = 1e-9
    pool_factor: int = 8

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Certificate:
    alpha: List[float]
    max_eig: float
    iterations: int

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "max_eig": self.max_eig, "iterations": self.iterations}


@dataclass
class CertificateResult:
    found: bool
    status: str
    certificate: Certificate
    lower_bound: Optional[float] = None
    # lambda_max at sigma0 and then at each LP iterate, not a running minimum
    history: List[float] = field(default_factory=list)
    lower_history: List[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "status": self.status,
            "certificate": self.certificate.to_json(),
            "lower_bound": self.lower_bound,
            "history": self.history,
            "lower_history": self.lower_history,
        }


def _slater_check(sigmas: Sequence[QuadraticForm], witness: Optional[SequencePair]) -> np.ndarray:
    if not sigmas:
        return np.zeros(0)
    H = sigmas[0].H
    if witness is None:
        witness = witness_signal(H)
    f = sigmas[0].stack(witness)
    values = [s.evaluate(f) for s in sigmas]
    bad = [k for k, value in enumerate(values) if value <= 0.0]
    if bad:
        raise SlaterViolated(f"witness leaves forms {bad[:5]} nonpositive")
    return f


class _CuttingPlane:
    """Kelley's method on ``lambda_max(sigma0 + sum alpha_k sigma_k)``.

    Each cut ``f`` linearizes the maximum eigenvalue from below:
    ``s >= f^T Q(alpha) f``. The LP minimizes ``s`` over the box
    ``0 <= alpha <= alpha_max``; its optimum is a lower bound on the
    smallest achievable eigenvalue in the box.
    """

    def __init__(self, sigma0: QuadraticForm, sigmas: Sequence[QuadraticForm], config: CertificateConfig):
        self.sigma0 = sigma0
        self.sigmas = list(sigmas)
        self.config = config
        self.cuts: List[np.ndarray] = []
        self.solver = TwoPhaseSimplex()

    def add_cut(self, f: np.ndarray):
        norm = np.linalg.norm(f)
        if norm > 0.0:
            self.cuts.append(f / norm)

    def solve(self) -> Tuple[np.ndarray, float]:
        n = len(self.sigmas)
        rows, rhs = [], []
        for f in self.cuts:
            rows.append([s.evaluate(f) for s in self.sigmas] + [-1.0, 1.0])
            rhs.append(-self.sigma0.evaluate(f))
        box = np.hstack([np.eye(n), np.zeros((n, 2))])
        A_ub = np.vstack([np.asarray(rows), box]) if n else np.asarray(rows)
        b_ub = np.concatenate([rhs, np.full(n, self.config.alpha_max)])
        c = np.concatenate([np.full(n, self.config.regularizer), [1.0, -1.0]])
        result = self.solver.solve(c, A_ub=A_ub, b_ub=b_ub)
        if not result.success:
            raise SlaterViolated(f"cutting-plane LP is {result.status}")
        alpha = result.x[:n]
        lower = float(result.x[n] - result.x[n + 1])
        self._prune(alpha, lower)
        return alpha, lower

    def _prune(self, alpha: np.ndarray, lower: float):
        cap = self.config.pool_factor * (len(self.sigmas) + 2)
        if len(self.cuts) <= cap:
            return
        Q = combined_matrix(self.sigma0, alpha, self.sigmas)
        slack = np.array([lower - float(f @ Q @ f) for f in self.cuts])
        recent = set(range(len(self.cuts) - self.config.cuts_per_iter, len(self.cuts)))
        order = np.argsort(slack, kind="stable")
        keep = sorted(set(order[:cap - len(recent)].tolist()) | recent)
        self.cuts = [self.cuts[i] for i in keep]


def certificate_search(sigma0: QuadraticForm, sigmas: Sequence[QuadraticForm],
                       config: Optional[CertificateConfig] = None,
                       witness: Optional[SequencePair] = None) -> CertificateResult:
    """Nonnegative ``alpha`` with ``lambda_max(sigma0 + sum alpha_k sigma_k) <= tol``.

    ``found=False`` only says no certificate turned up at this horizon within
    the iteration budget or the weight box.
    """
    config = config or CertificateConfig()
    sigmas = list(sigmas)
    for s in sigmas:
        if s.H != sigma0.H:
            raise ValueError(f"form horizon {s.H} differs from sigma0 horizon {sigma0.H}")
    f_slater = _slater_check(sigmas, witness)

    plane = _CuttingPlane(sigma0, sigmas, config)
    eigvals, V = jacobi_eigh(sigma0.matrix, tol=EIG_TOL)
    for i in range(2 * sigma0.H):
        plane.add_cut(V[:, i])
    plane.add_cut(f_slater)

    best_alpha = np.zeros(len(sigmas))
    best_eig = float(eigvals[-1])
    history = [best_eig]
    lower_history: List[float] = []
    lower = None
    iterations = 0
    while best_eig > config.tol and iterations < config.max_iter:
        iterations += 1
        alpha, lower = plane.solve()
        eigvals, V = jacobi_eigh(combined_matrix(sigma0, alpha, sigmas), tol=EIG_TOL)
        lam = float(eigvals[-1])
        if lam < best_eig:
            best_alpha, best_eig = alpha, lam
        history.append(lam)
        lower_history.append(lower)
        logger.debug(f"cutting plane {iterations}: lambda_max={lam:.3e}, lower bound={lower:.3e}")
        if lower > config.tol:
            logger.warning(f"lower bound {lower:.3e} > 0 inside the weight box; stopping")
            break
        for k in range(1, config.cuts_per_iter + 1):
            if eigvals[-k] > config.tol:
                plane.add_cut(V[:, -k])

    found = best_eig <= config.tol
    if found:
        best_eig = combined_max_eig(sigma0, best_alpha, sigmas)
        found = best_eig <= config.tol
    certificate = Certificate(best_alpha.tolist(), best_eig, iterations)
    status = FOUND if found else INCONCLUSIVE
    if found:
        logger.info(f"certificate found after {iterations} iterations, lambda_max={best_eig:.3e}")
    else:
        logger.warning(f"no certificate after {iterations} iterations, best lambda_max={best_eig:.3e}")
    return CertificateResult(found, status, certificate, lower, history, lower_history)


def certificate_multiplier(certificate: Certificate, basis: Sequence[BandedPeriodicPermutation]) -> PeriodicBandedOperator:
    """``sum alpha_k (I - P_k)``, the multiplier carried by a certificate."""
    if not basis:
        raise ValueError("empty basis")
    T, B = basis[0].T, basis[0].B
    return combine(list(zip(certificate.alpha, basis)), T, B)
