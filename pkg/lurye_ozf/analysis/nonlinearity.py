"""Memoryless piecewise-linear nonlinearities: the monotone class, the
time-varying sector class, and interpolation of similarly ordered pairs."""

import logging
from dataclasses import dataclass
from itertools import groupby
from typing import Optional, Tuple, Union

import numpy as np

from lurye_ozf.core.exceptions import NotMonotone, NotSector, NotSimilarlyOrdered
from lurye_ozf.signal.signals import SequencePair, Signal, is_similarly_ordered, truncate_window

logger = logging.getLogger(__name__)

Breakpoints = Tuple[Tuple[float, float], ...]


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolation through ``breakpoints``, linear extension beyond.

    ``(0, 0)`` is inserted when missing so that every segment stays on one
    side of the origin.
    """

    breakpoints: Breakpoints = ((0.0, 0.0),)
    left_slope: float = 0.0
    right_slope: float = 0.0

    def __post_init__(self):
        pts = sorted((float(x), float(y)) for x, y in self.breakpoints)
        if any(x1 == x0 for (x0, _), (x1, _) in zip(pts, pts[1:])):
            raise NotMonotone(f"breakpoints repeat an abscissa: {pts}")
        if not any(x == 0.0 for x, _ in pts):
            pts.append((0.0, float(self._raw_eval(pts, 0.0))) if pts else (0.0, 0.0))
            pts.sort()
        object.__setattr__(self, "breakpoints", tuple(pts))
        object.__setattr__(self, "left_slope", float(self.left_slope))
        object.__setattr__(self, "right_slope", float(self.right_slope))
        if self.evaluate(0.0) != 0.0:
            raise NotMonotone(f"nonlinearity must pass through the origin, N(0)={self.evaluate(0.0)}")

    def _raw_eval(self, pts, x: float) -> float:
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        if x < xs[0]:
            return ys[0] + self.left_slope * (x - xs[0])
        if x > xs[-1]:
            return ys[-1] + self.right_slope * (x - xs[-1])
        return float(np.interp(x, xs, ys))

    @property
    def xs(self) -> np.ndarray:
        return np.array([p[0] for p in self.breakpoints])

    @property
    def ys(self) -> np.ndarray:
        return np.array([p[1] for p in self.breakpoints])

    def __call__(self, x: Union[float, np.ndarray]):
        x = np.asarray(x, dtype=float)
        xs, ys = self.xs, self.ys
        out = np.interp(x, xs, ys)
        out = np.where(x < xs[0], ys[0] + self.left_slope * (x - xs[0]), out)
        out = np.where(x > xs[-1], ys[-1] + self.right_slope * (x - xs[-1]), out)
        return float(out) if out.ndim == 0 else out

    def evaluate(self, x: float) -> float:
        return float(self(x))

    def segment_slopes(self) -> np.ndarray:
        xs, ys = self.xs, self.ys
        inner = np.diff(ys) / np.diff(xs) if xs.size > 1 else np.zeros(0)
        return np.concatenate([[self.left_slope], inner, [self.right_slope]])

    @property
    def lipschitz(self) -> float:
        return float(np.max(np.abs(self.segment_slopes())))

    @property
    def slope_bound(self) -> float:
        """Smallest ``C`` with ``|N(x)| <= C |x|``."""
        xs, ys = self.xs, self.ys
        nz = xs != 0.0
        ratios = np.abs(ys[nz] / xs[nz]) if np.any(nz) else np.zeros(0)
        return float(max([abs(self.left_slope), abs(self.right_slope), *ratios]))

    def to_json(self) -> dict:
        return {
            "breakpoints": [list(p) for p in self.breakpoints],
            "left_slope": self.left_slope,
            "right_slope": self.right_slope,
        }

    @classmethod
    def from_json(cls, data: dict):
        return cls(
            tuple(tuple(p) for p in data.get("breakpoints", [[0.0, 0.0]])),
            float(data.get("left_slope", 0.0)),
            float(data.get("right_slope", 0.0)),
        )


@dataclass(frozen=True)
class PiecewiseLinearMonotone(PiecewiseLinear):
    def __post_init__(self):
        super().__post_init__()
        if np.any(self.segment_slopes() < 0.0):
            raise NotMonotone(f"decreasing segment in {self.breakpoints}")

    @classmethod
    def linear(cls, k: float) -> "PiecewiseLinearMonotone":
        return cls(((0.0, 0.0),), k, k)


def lift(N: PiecewiseLinear, v: Signal) -> Signal:
    if v.is_zero:
        return v
    return Signal.from_array(N(np.asarray(v.values)), v.start)


@dataclass
class Interpolation:
    N: PiecewiseLinearMonotone
    v_hat: Signal
    w_hat: Signal
    delta_used: float
    error_bound: float
    truncation_error: float
    v_bar: Signal

    @property
    def perturbation(self) -> float:
        """``|| v_bar - v_hat ||`` on the truncated pair."""
        return (self.v_hat - self.v_bar).norm()

    def to_json(self) -> dict:
        return {
            "N": self.N.to_json(),
            "v_hat": self.v_hat.to_json(),
            "w_hat": self.w_hat.to_json(),
            "delta_used": self.delta_used,
            "error_bound": self.error_bound,
            "truncation_error": self.truncation_error,
        }


def _perturb(v: np.ndarray, w: np.ndarray, delta: float) -> np.ndarray:
    """Spread repeated values of ``v`` along slope-``delta`` lines.

    Each group of equal ``v`` is anchored at the sample whose ``w`` is closest
    to zero, which keeps ``|v_hat - v| <= delta |w|`` samplewise.
    """
    v_hat = v.copy()
    order = sorted(range(v.size), key=lambda k: v[k])
    for c, group in groupby(order, key=lambda k: v[k]):
        idx = list(group)
        if c == 0.0:
            v_hat[idx] = delta * w[idx]
            continue
        anchor = w[idx].min() if c > 0 else w[idx].max()
        v_hat[idx] = c + delta * (w[idx] - anchor)
    return v_hat


def _monotone_points(v_hat: np.ndarray, w: np.ndarray) -> Optional[Breakpoints]:
    points = sorted(set(zip(v_hat.tolist(), w.tolist())) | {(0.0, 0.0)})
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x0 == x1 or y1 < y0:
            return None
    return tuple(points)


def interpolate_monotone(p: SequencePair, delta: float = 1e-3, tau: Optional[int] = None,
                         max_halvings: int = 60) -> Interpolation:
    """Monotone ``N`` through a perturbed copy of a similarly ordered pair."""
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    if not is_similarly_ordered(p):
        raise NotSimilarlyOrdered()
    if tau is not None:
        v_bar, w_bar = truncate_window(p.v, -tau, tau), truncate_window(p.w, -tau, tau)
    else:
        v_bar, w_bar = p.v, p.w
    truncation_error = (p.v - v_bar).norm()
    a, v, w = SequencePair(v_bar, w_bar).dense()
    used = delta
    for _ in range(max_halvings):
        v_hat = _perturb(v, w, used)
        points = _monotone_points(v_hat, w)
        if points is not None:
            break
        logger.warning(f"delta={used:g} breaks monotonicity of the interpolation points, halving")
        used /= 2.0
    else:
        raise NotSimilarlyOrdered(f"no admissible delta down to {used:g}")
    N = PiecewiseLinearMonotone(points, 0.0, 0.0)
    result = Interpolation(
        N=N,
        v_hat=Signal.from_array(v_hat, a),
        w_hat=Signal.from_array(w, a),
        delta_used=used,
        error_bound=used * w_bar.norm(),
        truncation_error=truncation_error,
        v_bar=v_bar,
    )
    return result


@dataclass(frozen=True)
class SectorNonlinearity:
    """Time-varying memoryless map ``psi(x, k) = phases[k mod P](x)`` with ``psi(x, k) x >= 0``."""

    phases: Tuple[PiecewiseLinear, ...]
    lipschitz_bound: Optional[float] = None

    def __post_init__(self):
        phases = tuple(self.phases)
        if not phases:
            raise NotSector("at least one phase is required")
        object.__setattr__(self, "phases", phases)
        for i, phase in enumerate(phases):
            if phase.left_slope < 0.0 or phase.right_slope < 0.0:
                raise NotSector(f"phase {i} extension leaves the sector")
            if any(x * y < 0.0 for x, y in phase.breakpoints):
                raise NotSector(f"phase {i} has a breakpoint outside the sector")
        if self.lipschitz_bound is not None and self.lipschitz > self.lipschitz_bound:
            raise NotSector(f"phase slopes reach {self.lipschitz}, above L={self.lipschitz_bound}")

    @classmethod
    def zero(cls) -> "SectorNonlinearity":
        return cls((PiecewiseLinear(),))

    @classmethod
    def linear(cls, k: float) -> "SectorNonlinearity":
        return cls((PiecewiseLinear(((0.0, 0.0),), k, k),))

    @property
    def period(self) -> int:
        return len(self.phases)

    @property
    def lipschitz(self) -> float:
        return max(phase.lipschitz for phase in self.phases)

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "phases": [phase.to_json() for phase in self.phases],
            "lipschitz": self.lipschitz_bound,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SectorNonlinearity":
        phases = tuple(PiecewiseLinear.from_json(p) for p in data.get("phases", []))
        if "period" in data and int(data["period"]) != len(phases):
            raise NotSector(f"period {data['period']} does not match {len(phases)} phases")
        return cls(phases, data.get("lipschitz"))


def evaluate_sector(psi: SectorNonlinearity, x: float, k: int) -> float:
    return psi.phases[k % psi.period].evaluate(x)


def lift_sector(psi: SectorNonlinearity, v: Signal) -> Signal:
    if v.is_zero:
        return v
    out = [evaluate_sector(psi, x, v.start + i) for i, x in enumerate(v.values)]
    return Signal.from_array(out, v.start)


@dataclass(frozen=True)
class MonotoneFamily:
    """Shape of randomly drawn monotone nonlinearities."""

    n_breakpoints: int = 6
    x_range: float = 3.0
    slope_cap: float = 1.0
    saturate: bool = True

    def to_json(self) -> dict:
        return {
            "n_breakpoints": self.n_breakpoints,
            "x_range": self.x_range,
            "slope_cap": self.slope_cap,
            "saturate": self.saturate,
        }


def random_monotone(seed: Union[int, np.random.Generator], family: Optional[MonotoneFamily] = None) -> PiecewiseLinearMonotone:
    family = family or MonotoneFamily()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    per_side = max(family.n_breakpoints // 2, 1)
    points = [(0.0, 0.0)]
    for sign in (1.0, -1.0):
        xs = np.sort(rng.uniform(0.0, family.x_range, per_side))
        xs = np.unique(xs[xs > 0.0])
        slopes = rng.uniform(0.0, family.slope_cap, xs.size)
        ys = np.cumsum(slopes * np.diff(np.concatenate([[0.0], xs])))
        points.extend((sign * x, sign * y) for x, y in zip(xs, ys))
    if family.saturate:
        left, right = 0.0, 0.0
    else:
        left, right = rng.uniform(0.0, family.slope_cap, 2)
    return PiecewiseLinearMonotone(tuple(points), float(left), float(right))
