"""Causal rational LTI plants in the delay variable.

Loop convention is ``v = G w + e`` (positive feedback); negate ``num`` for the
negative-feedback reading.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import linalg, signal

from lurye_ozf.core.exceptions import DomainError, InconclusiveWinding
from lurye_ozf.signal.signals import Signal

logger = logging.getLogger(__name__)

WINDING_POINTS = 2 ** 14
WINDING_MAX_POINTS = 2 ** 18
WINDING_FLOOR = 1e-10
CIRCLE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ToeplitzTruncation:
    H: int
    entries: np.ndarray

    def __matmul__(self, other):
        return self.entries @ other


@dataclass(frozen=True)
class RationalPlant:
    """``G(z) = (b0 + b1 z^-1 + ...) / (a0 + a1 z^-1 + ...)``."""

    num: Tuple[float, ...]
    den: Tuple[float, ...] = (1.0,)

    def __post_init__(self):
        num = tuple(float(x) for x in self.num) or (0.0,)
        den = tuple(float(x) for x in self.den)
        if not den or den[0] == 0.0:
            raise DomainError(f"leading denominator coefficient must be nonzero, got {den}")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def static(cls, gain: float) -> "RationalPlant":
        return cls((gain,), (1.0,))

    @property
    def order(self) -> int:
        return len(self.den) - 1

    @property
    def feedthrough(self) -> float:
        return self.num[0] / self.den[0]

    def frequency_response(self, omega: Union[float, np.ndarray]):
        """``G(e^{jw})`` with ``z^-1 = e^{-jw}``; scalar in, scalar out."""
        zinv = np.exp(-1j * np.asarray(omega, dtype=float))
        b = np.polyval(self.num[::-1], zinv)
        a = np.polyval(self.den[::-1], zinv)
        if np.any(np.abs(a) < CIRCLE_FLOOR):
            raise DomainError("denominator vanishes on the unit circle")
        out = b / a
        return complex(out) if np.ndim(out) == 0 else out

    def impulse_response(self, n: int) -> np.ndarray:
        if n < 1:
            raise ValueError(f"impulse response length must be >= 1, got {n}")
        delta = np.zeros(n)
        delta[0] = 1.0
        return signal.lfilter(self.num, self.den, delta)

    def is_stable(self) -> bool:
        """All denominator roots strictly inside the unit circle.

        Counts the winding of ``a(z) = a0 z^n + ... + an`` around the origin,
        re-evaluating at double resolution until two grids agree.
        """
        if self.order == 0:
            return True
        points = WINDING_POINTS
        previous = self._winding(points)
        while points < WINDING_MAX_POINTS:
            points *= 2
            current = self._winding(points)
            if current == previous:
                logger.debug(f"winding {current} at {points} points, order {self.order}")
                return current == self.order
            previous = current
        raise InconclusiveWinding(f"winding count did not settle up to {points} points")

    def _winding(self, points: int) -> int:
        z = np.exp(1j * np.linspace(0.0, 2.0 * np.pi, points + 1))
        a = np.polyval(self.den, z)
        if np.min(np.abs(a)) < WINDING_FLOOR:
            raise InconclusiveWinding(f"|a(e^jw)| below {WINDING_FLOOR} on the grid")
        phase = np.unwrap(np.angle(a))
        return int(round((phase[-1] - phase[0]) / (2.0 * np.pi)))

    def toeplitz_truncation(self, H: int) -> ToeplitzTruncation:
        g = self.impulse_response(H)
        return ToeplitzTruncation(H, linalg.toeplitz(g, np.zeros(H)))

    def apply(self, u: Signal, horizon: int) -> Signal:
        """Output samples ``0..horizon-1`` for an input supported on ``k >= 0``."""
        if not u.is_zero and u.start < 0:
            raise DomainError(f"input must be supported on k >= 0, starts at {u.start}")
        if horizon < 1:
            return Signal()
        y = signal.lfilter(self.num, self.den, u.window(0, horizon))
        return Signal.from_array(y, 0)

    def to_json(self) -> dict:
        return {"num": list(self.num), "den": list(self.den)}

    @classmethod
    def from_json(cls, data: dict) -> "RationalPlant":
        if "num" not in data:
            raise DomainError("plant needs a 'num' field")
        return cls(tuple(data["num"]), tuple(data.get("den", [1.0])))
