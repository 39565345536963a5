"""Time-domain Lurye loop ``v = G w + e``, ``w = N(v)``, with empirical
gain estimates and a randomized search for destabilizing nonlinearities.

Every gain reported here is a lower bound on the true loop gain.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from lurye_ozf.analysis.nonlinearity import MonotoneFamily, PiecewiseLinearMonotone, random_monotone
from lurye_ozf.core.exceptions import BisectionFailure, DomainError, UnstablePlant, WellPosednessUnverifiable
from lurye_ozf.signal.plant import RationalPlant
from lurye_ozf.signal.signals import Signal
from lurye_ozf.util.parallel import argmax_first, ordered_map

logger = logging.getLogger(__name__)

GAIN_FLOOR = 1e-12
MAX_BISECTIONS = 200
BLOWUP = 1e12
DIVERGENCE_GAIN = 1e8


@dataclass(frozen=True)
class SimConfig:
    plant: RationalPlant
    nonlinearity: PiecewiseLinearMonotone
    e: Signal
    horizon: int
    allow_unstable: bool = False


@dataclass
class SimResult:
    e: Signal
    v: Signal
    w: Signal
    gains: List[Tuple[int, float]]
    peak_gain: float
    horizon: int
    diverged: bool = False

    def trace_rows(self) -> List[List[float]]:
        """``k, e_k, v_k, w_k, gain_k`` rows (gain blank where ``P_k e = 0``)."""
        gain_at = dict(self.gains)
        return [
            [k, self.e[k], self.v[k], self.w[k], gain_at.get(k, "")]
            for k in range(self.horizon)
        ]

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "peak_gain": self.peak_gain,
            "diverged": self.diverged,
            "lower_bound": True,
        }


def _solve_step(c: float, g0: float, N: PiecewiseLinearMonotone) -> float:
    """Root of ``v - g0 N(v) = c``; the left side is strictly increasing."""
    h = lambda x: x - g0 * N.evaluate(x)
    radius = max(1.0, abs(c))
    lo, hi = c - radius, c + radius
    for _ in range(MAX_BISECTIONS):
        if h(lo) <= c <= h(hi):
            break
        radius *= 2.0
        lo, hi = c - radius, c + radius
    else:
        raise BisectionFailure(f"no bracket for v - {g0} N(v) = {c}")
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if h(mid) < c:
            lo = mid
        else:
            hi = mid
    return lo if abs(h(lo) - c) <= abs(h(hi) - c) else hi


def check_well_posed(plant: RationalPlant, N: PiecewiseLinearMonotone):
    g0 = plant.feedthrough
    if g0 > 0.0 and g0 * N.lipschitz >= 1.0:
        raise WellPosednessUnverifiable(f"g0={g0:g} with slope {N.lipschitz:g}")


def simulate(cfg: SimConfig) -> SimResult:
    H = cfg.horizon
    if H < 1:
        raise ValueError(f"horizon must be >= 1, got {H}")
    if not cfg.e.is_zero and cfg.e.start < 0:
        raise DomainError(f"input must be supported on k >= 0, starts at {cfg.e.start}")
    G, N = cfg.plant, cfg.nonlinearity
    if not cfg.allow_unstable and not G.is_stable():
        raise UnstablePlant()
    check_well_posed(G, N)

    b, a = np.asarray(G.num), np.asarray(G.den)
    g0 = G.feedthrough
    e = cfg.e.window(0, H)
    v, w, y = np.zeros(H), np.zeros(H), np.zeros(H)
    diverged = False
    for k in range(H):
        nb, na = min(k, b.size - 1), min(k, a.size - 1)
        acc = b[1:nb + 1] @ w[k - 1::-1][:nb] if nb else 0.0
        acc -= a[1:na + 1] @ y[k - 1::-1][:na] if na else 0.0
        c = acc / a[0] + e[k]
        v[k] = c if g0 == 0.0 else _solve_step(c, g0, N)
        w[k] = N.evaluate(v[k])
        y[k] = g0 * w[k] + acc / a[0]
        if not np.isfinite(v[k]) or abs(v[k]) > BLOWUP:
            diverged = True
            logger.debug(f"loop blew up at k={k}")
            v[k + 1:] = w[k + 1:] = 0.0
            break

    ne = np.sqrt(np.cumsum(e * e))
    nw = np.sqrt(np.cumsum(w * w))
    gains = [(k, float(nw[k] / ne[k])) for k in range(H) if ne[k] > GAIN_FLOOR]
    peak = max((g for _, g in gains), default=0.0)
    return SimResult(cfg.e, Signal.from_array(v), Signal.from_array(w), gains, peak, H, diverged)


@dataclass(frozen=True)
class InputFamily:
    impulses: bool = True
    steps: bool = True
    n_bursts: int = 4
    n_sinusoids: int = 4
    seed: int = 0

    def inputs(self, H: int) -> List[Tuple[str, Signal]]:
        rng = np.random.default_rng(self.seed)
        out: List[Tuple[str, Signal]] = []
        if self.impulses:
            out.append(("impulse", Signal.impulse(0)))
        if self.steps:
            out.append(("step", Signal.from_array(np.ones(H))))
        width = max(H // 4, 1)
        for i in range(self.n_bursts):
            offset = int(rng.integers(0, max(H - width, 0) + 1))
            out.append((f"burst{i}", Signal.from_array(rng.choice([-1.0, 1.0], width), offset)))
        k = np.arange(max(H // 2, 1))
        window = np.hanning(k.size + 2)[1:-1]
        for i in range(self.n_sinusoids):
            omega = float(rng.uniform(0.0, np.pi))
            out.append((f"sine{i}", Signal.from_array(window * np.sin(omega * k + 0.5))))
        return out

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class GainEstimate:
    gamma: float
    worst_input: str
    worst_e: Signal
    diverged: bool
    per_input: List[Tuple[str, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "worst_input": self.worst_input,
            "worst_e": self.worst_e.to_json(),
            "diverged": self.diverged,
            "per_input": [list(p) for p in self.per_input],
            "lower_bound": True,
        }


def estimate_gain(plant: RationalPlant, N: PiecewiseLinearMonotone, inputs: Optional[InputFamily] = None,
                  H: int = 128, allow_unstable: bool = False, jobs: int = 1) -> GainEstimate:
    inputs = inputs or InputFamily()
    family = inputs.inputs(H)
    results = ordered_map(lambda item: simulate(SimConfig(plant, N, item[1], H, allow_unstable)), family, jobs)
    peaks = [r.peak_gain if np.isfinite(r.peak_gain) else np.inf for r in results]
    best = argmax_first(peaks)
    diverged = any(r.diverged for r in results) or any(p > DIVERGENCE_GAIN for p in peaks)
    if not diverged:
        for r in results:
            trace = dict(r.gains)
            half, last = trace.get(H // 2 - 1), trace.get(H - 1)
            if half and last and last > 10.0 * half and last > 1.0:
                diverged = True
    if diverged:
        logger.warning(f"loop gain grows without bound on horizon {H}")
    return GainEstimate(
        gamma=peaks[best],
        worst_input=family[best][0],
        worst_e=family[best][1],
        diverged=diverged,
        per_input=[(name, p) for (name, _), p in zip(family, peaks)],
    )


@dataclass
class ProbeResult:
    worst_N: PiecewiseLinearMonotone
    worst_input: str
    worst_e: Signal
    gamma: float
    diverged: bool
    evaluations: int

    def to_json(self) -> dict:
        return {
            "worst_N": self.worst_N.to_json(),
            "worst_input": self.worst_input,
            "worst_e": self.worst_e.to_json(),
            "gamma": self.gamma,
            "diverged": self.diverged,
            "evaluations": self.evaluations,
            "lower_bound": True,
        }


def _neighbours(N: PiecewiseLinearMonotone, cap: float, step: float) -> List[PiecewiseLinearMonotone]:
    """Move one breakpoint value up or down while keeping slopes in ``[0, cap]``."""
    pts = list(N.breakpoints)
    out = []
    for i, (x, y) in enumerate(pts):
        if x == 0.0:
            continue
        lo, hi = -np.inf, np.inf
        if i > 0:
            xp, yp = pts[i - 1]
            lo, hi = max(lo, yp), min(hi, yp + cap * (x - xp))
        if i + 1 < len(pts):
            xn, yn = pts[i + 1]
            lo, hi = max(lo, yn - cap * (xn - x)), min(hi, yn)
        for delta in (step, -step):
            y_new = float(np.clip(y + delta, lo, hi))
            if y_new != y:
                moved = pts[:i] + [(x, y_new)] + pts[i + 1:]
                out.append(PiecewiseLinearMonotone(tuple(moved), N.left_slope, N.right_slope))
    return out


def destabilization_probe(plant: RationalPlant, family: Optional[MonotoneFamily] = None, budget: int = 32,
                          H: int = 128, inputs: Optional[InputFamily] = None, seed: int = 0,
                          refine_rounds: int = 2, jobs: int = 1, allow_unstable: bool = False) -> ProbeResult:
    """Random monotone candidates followed by coordinate refinement of the incumbent."""
    family = family or MonotoneFamily()
    inputs = inputs or InputFamily(seed=seed)
    children = np.random.SeedSequence(seed).spawn(budget)
    candidates = [random_monotone(np.random.default_rng(child), family) for child in children]
    score = lambda N: estimate_gain(plant, N, inputs, H, allow_unstable)
    estimates = ordered_map(score, candidates, jobs)
    best = argmax_first([est.gamma for est in estimates])
    incumbent, estimate = candidates[best], estimates[best]
    evaluations = len(candidates)

    step = 0.25 * family.x_range * family.slope_cap
    for round_ in range(refine_rounds):
        improved = False
        neighbours = _neighbours(incumbent, family.slope_cap, step)
        if neighbours:
            trial = ordered_map(score, neighbours, jobs)
            evaluations += len(neighbours)
            i = argmax_first([est.gamma for est in trial])
            if trial[i].gamma > estimate.gamma:
                incumbent, estimate, improved = neighbours[i], trial[i], True
        logger.debug(f"refinement round {round_}: gamma={estimate.gamma:.4g}, improved={improved}")
        step /= 2.0

    logger.info(f"destabilization probe: gamma >= {estimate.gamma:.4g} after {evaluations} evaluations")
    return ProbeResult(incumbent, estimate.worst_input, estimate.worst_e, estimate.gamma,
                       estimate.diverged, evaluations)
