"""FIR multipliers: frequency-domain verification, LP search, LTV-to-LTI
averaging, finite-horizon negativity and the nonlinear multiplier form."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np

from lurye_ozf.analysis.nonlinearity import PiecewiseLinear, SectorNonlinearity, lift, lift_sector
from lurye_ozf.core.exceptions import (
    DimensionMismatch,
    GridTooCoarse,
    InvalidOperator,
    NotHyperdominant,
    NotZeroExcess,
    UnstablePlant,
)
from lurye_ozf.matrix.periodic_banded import PeriodicBandedOperator, apply as apply_periodic, validate
from lurye_ozf.signal.plant import RationalPlant
from lurye_ozf.signal.signals import SequencePair, Signal, inner_product
from lurye_ozf.solver.jacobi import jacobi_eigh, max_eig
from lurye_ozf.solver.simplex import TwoPhaseSimplex
from lurye_ozf.util.parallel import argmax_first, ordered_map

logger = logging.getLogger(__name__)

COEFF_TOL = 1e-9
NEGATIVITY_TOL = 1e-9
DEFAULT_EPS_FREQ = 1e-6
IMPULSE_TERMS = 4096
MAX_GRID_POINTS = 2 ** 16


class ClassMode(str, Enum):
    HYPERDOMINANT = "hyperdominant"
    ZERO_EXCESS = "zero_excess"


@dataclass(frozen=True)
class FirMultiplier:
    """Noncausal FIR multiplier with coefficients ``m_{-B} .. m_{B}``.

    ``(M u)_i = sum_k m_k u_{i-k}``, so its Toeplitz matrix has ``m_{i-j}``
    at ``(i, j)``.
    """

    B: int
    coeffs: Tuple[float, ...]
    mode: ClassMode = ClassMode.HYPERDOMINANT

    def __post_init__(self):
        coeffs = tuple(float(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "mode", ClassMode(self.mode))
        if self.B < 0 or len(coeffs) != 2 * self.B + 1:
            raise DimensionMismatch(f"need 2B+1={2 * self.B + 1} coefficients, got {len(coeffs)}")
        off = [m for k, m in zip(self.lags, coeffs) if k != 0]
        if any(m > COEFF_TOL for m in off) or self.coeff(0) < -COEFF_TOL:
            raise NotHyperdominant(f"coefficient signs violate the multiplier class: {coeffs}")
        total = sum(coeffs)
        if total < -COEFF_TOL:
            raise NotHyperdominant(f"coefficient sum {total} is negative")
        if self.mode is ClassMode.ZERO_EXCESS and abs(total) > COEFF_TOL:
            raise NotZeroExcess(f"coefficient sum {total} is not zero")

    @classmethod
    def identity(cls, B: int = 0) -> "FirMultiplier":
        coeffs = [0.0] * (2 * B + 1)
        coeffs[B] = 1.0
        return cls(B, tuple(coeffs))

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.B, self.B + 1)

    def coeff(self, k: int) -> float:
        return self.coeffs[k + self.B] if abs(k) <= self.B else 0.0

    def frequency_response(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.exp(-1j * np.multiply.outer(omega, self.lags)) @ np.asarray(self.coeffs)
        return complex(out) if np.ndim(out) == 0 else out

    def toeplitz(self, H: int) -> np.ndarray:
        out = np.zeros((H, H))
        for k, m in zip(self.lags, self.coeffs):
            if abs(k) < H:
                out += m * np.eye(H, k=-int(k))
        return out

    def to_periodic(self, T: int) -> PeriodicBandedOperator:
        """The same operator stored as a T-periodic banded one (``rows[r, o+B] = m_{-o}``)."""
        rows = np.tile(np.asarray(self.coeffs)[::-1], (T, 1))
        return PeriodicBandedOperator(T, self.B, rows)

    def apply(self, u: Signal) -> Signal:
        if u.is_zero:
            return u
        return Signal.from_array(np.convolve(u.values, self.coeffs), u.start - self.B)

    def to_json(self) -> dict:
        return {"B": self.B, "coeffs": list(self.coeffs), "mode": self.mode.value}

    @classmethod
    def from_json(cls, data: dict) -> "FirMultiplier":
        return cls(int(data["B"]), tuple(data["coeffs"]), ClassMode(data.get("mode", "hyperdominant")))


Multiplier = Union[FirMultiplier, PeriodicBandedOperator]


def multiplier_matrix(M: Multiplier, H: int) -> np.ndarray:
    if isinstance(M, FirMultiplier):
        return M.toeplitz(H)
    if isinstance(M, PeriodicBandedOperator):
        return M.truncation(H)
    raise DimensionMismatch(f"unsupported multiplier type {type(M).__name__}")


def apply_multiplier(M: Multiplier, u: Signal) -> Signal:
    if isinstance(M, FirMultiplier):
        return M.apply(u)
    return apply_periodic(M, u)


@dataclass(frozen=True)
class FrequencyGrid:
    n_points: int = 512
    eps: float = DEFAULT_EPS_FREQ

    @classmethod
    def for_bandwidth(cls, B: int, eps: float = DEFAULT_EPS_FREQ) -> "FrequencyGrid":
        return cls(max(512, 16 * B), eps)

    @property
    def omegas(self) -> np.ndarray:
        return np.linspace(0.0, 2.0 * np.pi, self.n_points, endpoint=False)

    def half_omegas(self) -> np.ndarray:
        """Grid points in ``[0, pi]``; real coefficients make the rest a mirror image."""
        w = self.omegas
        return w[w <= np.pi + 1e-15]

    def check(self, B: int):
        if self.n_points < 4 * B + 4:
            raise GridTooCoarse(f"{self.n_points} points cannot resolve bandwidth B={B} (need {4 * B + 4})")


@dataclass
class FdiReport:
    passed: bool
    certified: bool
    worst_frequency: float
    worst_value: float
    eps: float
    n_points: int
    slope_bound: float
    continuum_bound: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _require_stable(G: RationalPlant):
    if not G.is_stable():
        raise UnstablePlant(f"plant den={list(G.den)} has poles on or outside the unit circle")


def _fdi_slope_bound(M: FirMultiplier, G: RationalPlant) -> float:
    """Bound on ``|d/dw Re{M(w) G(w)}|`` from coefficient sums."""
    g = G.impulse_response(IMPULSE_TERMS)
    k = np.arange(g.size)
    m = np.abs(np.asarray(M.coeffs))
    return float(np.sum(np.abs(M.lags) * m) * np.sum(np.abs(g)) + np.sum(m) * np.sum(k * np.abs(g)))


def verify_fdi(M: FirMultiplier, G: RationalPlant, grid: Optional[FrequencyGrid] = None,
               refine: bool = True) -> FdiReport:
    """``max_w Re{M(e^jw) G(e^jw)} <= -eps`` on the grid.

    ``certified`` additionally means the grid maximum plus the derivative
    bound times half the spacing stays below ``-eps/2`` on the whole circle;
    the grid is doubled until that holds or ``MAX_GRID_POINTS`` is reached.
    """
    _require_stable(G)
    grid = grid or FrequencyGrid.for_bandwidth(M.B)
    grid.check(M.B)
    slope = _fdi_slope_bound(M, G)
    n = grid.n_points
    while True:
        omegas = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        values = np.real(M.frequency_response(omegas) * G.frequency_response(omegas))
        i = int(np.argmax(values))
        worst = float(values[i])
        continuum = worst + slope * np.pi / n
        passed = worst <= -grid.eps
        certified = passed and continuum <= -grid.eps / 2.0
        if not passed or certified or not refine or n >= MAX_GRID_POINTS:
            break
        n *= 2
        logger.debug(f"refining frequency grid to {n} points (bound {continuum:.3e})")
    if passed and not certified:
        logger.warning(f"grid passes but the continuum bound {continuum:.3e} is not certified at {n} points")
    return FdiReport(passed, certified, float(omegas[i]), worst, grid.eps, n, slope, float(continuum))


@dataclass
class FarkasCertificate:
    """``y >= 0`` on inequality rows and free ``z`` on equality rows with
    ``A_ub^T y + A_eq^T z >= 0`` and ``b_ub.y + b_eq.z = -1``."""

    y: List[float]
    z: List[float]
    value: float
    residual: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def farkas_certificate(A_ub, b_ub, A_eq=None, b_eq=None, solver: Optional[TwoPhaseSimplex] = None) -> Optional[FarkasCertificate]:
    A_ub, b_ub = np.atleast_2d(A_ub), np.asarray(b_ub, dtype=float)
    n = A_ub.shape[1]
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(A_eq)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m1, m2 = A_ub.shape[0], A_eq.shape[0]
    # variables: y (m1), z+ (m2), z- (m2)
    stacked = np.vstack([A_ub, A_eq, -A_eq]).T
    rhs = np.concatenate([b_ub, b_eq, -b_eq])
    solver = solver or TwoPhaseSimplex()
    result = solver.solve(
        np.ones(m1 + 2 * m2),
        A_ub=-stacked,
        b_ub=np.zeros(n),
        A_eq=rhs[None, :],
        b_eq=np.array([-1.0]),
    )
    if not result.success:
        return None
    y, z = result.x[:m1], result.x[m1:m1 + m2] - result.x[m1 + m2:]
    combo = A_ub.T @ y + A_eq.T @ z
    value = float(b_ub @ y + b_eq @ z)
    return FarkasCertificate(y.tolist(), z.tolist(), value, float(max(0.0, -np.min(combo, initial=0.0))))


@dataclass
class SearchReport:
    feasible: bool
    B: int
    mode: ClassMode
    multiplier: Optional[FirMultiplier] = None
    worst_frequency: Optional[float] = None
    worst_value: Optional[float] = None
    lp_iterations: int = 0
    margin: Optional[float] = None
    fdi: Optional[FdiReport] = None
    farkas: Optional[FarkasCertificate] = None

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "B": self.B,
            "mode": self.mode.value,
            "multiplier": self.multiplier.to_json() if self.multiplier else None,
            "worst_frequency": self.worst_frequency,
            "worst_value": self.worst_value,
            "lp_iterations": self.lp_iterations,
            "margin": self.margin,
            "fdi": self.fdi.to_json() if self.fdi else None,
            "farkas": self.farkas.to_json() if self.farkas else None,
        }


def search_fir(G: RationalPlant, B: int, grid: Optional[FrequencyGrid] = None,
               mode: ClassMode = ClassMode.HYPERDOMINANT, solver: Optional[TwoPhaseSimplex] = None) -> SearchReport:
    """LP for ``m_0 = 1``, ``m_k <= 0`` and ``Re{M G} <= -eps - t`` on the grid.

    Variables are ``x_k = -m_k`` for ``k != 0`` and a margin ``t in [0, 1]``
    that is maximized; the program is feasible iff some multiplier meets the
    grid inequality.
    """
    _require_stable(G)
    mode = ClassMode(mode)
    grid = grid or FrequencyGrid.for_bandwidth(B)
    grid.check(B)
    solver = solver or TwoPhaseSimplex()
    lags = np.array([k for k in range(-B, B + 1) if k != 0], dtype=float)
    omegas = grid.half_omegas()
    g = G.frequency_response(omegas)
    C = np.real(np.exp(-1j * np.multiply.outer(omegas, lags)) * g[:, None])
    nx = lags.size

    A_ub = np.hstack([-C, np.ones((omegas.size, 1))])
    b_ub = -grid.eps - np.real(g)
    cap = np.zeros((1, nx + 1))
    cap[0, -1] = 1.0
    A_ub = np.vstack([A_ub, cap])
    b_ub = np.append(b_ub, 1.0)
    class_row = np.append(np.ones(nx), 0.0)[None, :]
    if mode is ClassMode.HYPERDOMINANT:
        A_ub, b_ub = np.vstack([A_ub, class_row]), np.append(b_ub, 1.0)
        A_eq, b_eq = None, None
    else:
        A_eq, b_eq = class_row, np.array([1.0])
    c = np.append(np.zeros(nx), -1.0)

    result = solver.solve(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq)
    if not result.success:
        farkas = farkas_certificate(A_ub, b_ub, A_eq, b_eq)
        report = SearchReport(False, B, mode, lp_iterations=result.iterations, farkas=farkas)
        if farkas is not None:
            rows = np.asarray(farkas.y[:omegas.size])
            if rows.size and rows.max() > 0.0:
                k = int(np.argmax(rows))
                report.worst_frequency = float(omegas[k])
                report.worst_value = float(np.real(g[k]))
        logger.info(f"no FIR multiplier with B={B} ({mode.value}) on {grid.n_points} points")
        return report

    x, t = result.x[:nx], float(result.x[-1])
    coeffs = np.zeros(2 * B + 1)
    coeffs[B] = 1.0
    for k, xk in zip(lags.astype(int), x):
        coeffs[k + B] = -xk
    if mode is ClassMode.ZERO_EXCESS:
        coeffs[B] = -float(np.sum(coeffs) - 1.0)
    multiplier = FirMultiplier(B, tuple(coeffs), mode)
    fdi = verify_fdi(multiplier, G, grid)
    logger.info(f"LP margin {t:.3e} for B={B} ({mode.value}); independent check passed={fdi.passed}")
    return SearchReport(
        feasible=fdi.passed,
        B=B,
        mode=mode,
        multiplier=multiplier if fdi.passed else None,
        worst_frequency=fdi.worst_frequency,
        worst_value=fdi.worst_value,
        lp_iterations=result.iterations,
        margin=t,
        fdi=fdi,
    )


def average_to_lti(M: PeriodicBandedOperator) -> FirMultiplier:
    """``(1/T) sum_tau S_-tau M S_tau``: ``m_k = mean_r m_{r, r-k}``."""
    diagnostics = validate(M)
    if not diagnostics.valid:
        raise InvalidOperator(f"cannot average: {diagnostics.describe()}")
    coeffs = M.rows.mean(axis=0)[::-1]
    coeffs[np.abs(coeffs) < 1e-15] = 0.0
    coeffs[M.B] -= float(np.sum(coeffs))
    return FirMultiplier(M.B, tuple(coeffs), ClassMode.ZERO_EXCESS)


@dataclass
class NegativityReport:
    holds: bool
    max_eig: float
    witness: Signal
    H: int
    eps: float
    window: Tuple[int, int]

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "max_eig": self.max_eig,
            "witness": self.witness.to_json(),
            "H": self.H,
            "eps": self.eps,
            "window": list(self.window),
        }


def negativity_form(M: Multiplier, G: RationalPlant, H: int, eps: float) -> np.ndarray:
    """``sym(T_M T_G) + eps I`` on horizon H."""
    Q = multiplier_matrix(M, H) @ G.toeplitz_truncation(H).entries
    return 0.5 * (Q + Q.T) + eps * np.eye(H)


def quadratic_negativity(M: Multiplier, G: RationalPlant, H: int, eps: float,
                         window: Optional[Tuple[int, int]] = None) -> NegativityReport:
    """Finite-horizon ``<M G w, w> <= -eps ||w||^2``.

    With ``window=(lo, hi)`` only signals supported on ``lo..hi-1`` are tested;
    for ``hi <= H - B`` the truncated form is exact on that window.
    """
    if H < 1:
        raise ValueError(f"horizon must be >= 1, got {H}")
    _require_stable(G)
    lo, hi = window or (0, H)
    if not 0 <= lo < hi <= H:
        raise ValueError(f"window {window} does not fit horizon {H}")
    Q = negativity_form(M, G, H, eps)[lo:hi, lo:hi]
    lam, vec = max_eig(Q)
    holds = lam <= NEGATIVITY_TOL
    if not holds:
        logger.debug(f"negativity fails on H={H}: lambda_max={lam:.3e}")
    return NegativityReport(holds, lam, Signal.from_array(vec, lo), H, eps, (lo, hi))


@dataclass(frozen=True)
class ProbeConfig:
    H: int = 32
    n_random: int = 64
    n_eigen: int = 4
    scales: Tuple[float, ...] = (0.1, 1.0, 10.0)
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "H": self.H,
            "n_random": self.n_random,
            "n_eigen": self.n_eigen,
            "scales": list(self.scales),
            "seed": self.seed,
        }


def evaluate_nonlinear_form(M: Multiplier, phi0: PiecewiseLinear, psi: SectorNonlinearity,
                            G: RationalPlant, eps: float, w, H: Optional[int] = None) -> float:
    """``J(w) = <M phi0(G w), w> + <psi(G w, k), w> + eps ||w||^2`` on ``0..H-1``."""
    w = w.window(0, H if H is not None else w.end) if isinstance(w, Signal) else np.asarray(w, dtype=float)
    H = w.size
    return _NonlinearForm(M, phi0, psi, G, eps, H)(w)


class _NonlinearForm:
    def __init__(self, M: Multiplier, phi0: PiecewiseLinear, psi: SectorNonlinearity,
                 G: RationalPlant, eps: float, H: int):
        self.TM = multiplier_matrix(M, H)
        self.TG = G.toeplitz_truncation(H).entries
        self.phi0 = phi0
        self.psi = psi
        self.eps = eps
        self.phase = np.arange(H) % psi.period

    def __call__(self, w: np.ndarray) -> float:
        y = self.TG @ w
        sector = np.empty_like(y)
        for p, phase in enumerate(self.psi.phases):
            mask = self.phase == p
            sector[mask] = phase(y[mask])
        return float(w @ (self.TM @ self.phi0(y)) + w @ sector + self.eps * (w @ w))


@dataclass
class NonlinearReport:
    max_value: float
    violated: bool
    worst_w: Signal
    n_probes: int
    H: int

    def to_json(self) -> dict:
        return {
            "max_value": self.max_value,
            "violated": self.violated,
            "worst_w": self.worst_w.to_json(),
            "n_probes": self.n_probes,
            "H": self.H,
        }


def _probe_family(form: "_NonlinearForm", phi0: PiecewiseLinear, psi: SectorNonlinearity,
                  eps: float, probes: ProbeConfig) -> List[np.ndarray]:
    H = probes.H
    rng = np.random.default_rng(probes.seed)
    base = [row for row in rng.standard_normal((probes.n_random, H))]
    if probes.n_eigen > 0:
        linear = phi0.lipschitz * form.TM @ form.TG + psi.lipschitz * form.TG
        Q = 0.5 * (linear + linear.T) + eps * np.eye(H)
        _, V = jacobi_eigh(Q)
        base.extend(V[:, -min(probes.n_eigen, H):].T)
    base.extend(np.eye(H))
    return [scale * w / np.linalg.norm(w) for w in base for scale in probes.scales]


def nonlinear_certificate(M: Multiplier, phi0: PiecewiseLinear, psi: SectorNonlinearity, G: RationalPlant,
                          eps: float, probes: Optional[ProbeConfig] = None, jobs: int = 1) -> NonlinearReport:
    """Largest ``J(w) / ||w||^2`` over a probe family.

    A nonpositive maximum is evidence for the nonlinear multiplier condition,
    not a proof of it.
    """
    _require_stable(G)
    probes = probes or ProbeConfig()
    form = _NonlinearForm(M, phi0, psi, G, eps, probes.H)
    family = _probe_family(form, phi0, psi, eps, probes)
    values = ordered_map(lambda w: form(w) / float(w @ w), family, jobs)
    best = argmax_first(values)
    report = NonlinearReport(values[best], values[best] > 0.0, Signal.from_array(family[best], 0), len(family), probes.H)
    logger.info(f"nonlinear form: max J/|w|^2 = {report.max_value:.4e} over {report.n_probes} probes")
    return report


def nonlinear_multiplier_value(M: Multiplier, phi0: PiecewiseLinear, psi: SectorNonlinearity,
                               p: SequencePair) -> float:
    """``<M phi0(v), w> + <psi(v, k), w>``; nonnegative whenever ``w = phi(v)`` for monotone phi."""
    return inner_product(apply_multiplier(M, lift(phi0, p.v)), p.w) + inner_product(lift_sector(psi, p.v), p.w)
