"""Finitely supported scalar sequences and their truncation/shift algebra."""

import logging
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def _canonical(start: int, values: Sequence[float]) -> Tuple[int, Tuple[float, ...]]:
    vals = [float(x) for x in values]
    lo = 0
    while lo < len(vals) and vals[lo] == 0.0:
        lo += 1
    if lo == len(vals):
        return 0, ()
    hi = len(vals)
    while vals[hi - 1] == 0.0:
        hi -= 1
    return int(start) + lo, tuple(vals[lo:hi])


@dataclass(frozen=True)
class Signal:
    """Real sequence that is zero outside ``[start, start + len(values))``.

    Construction trims leading and trailing exact zeros, so two signals with
    the same samples compare equal regardless of how they were padded.
    """

    start: int = 0
    values: Tuple[float, ...] = ()

    def __post_init__(self):
        start, values = _canonical(self.start, self.values)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "values", values)

    @classmethod
    def zero(cls) -> "Signal":
        return cls()

    @classmethod
    def impulse(cls, k: int = 0, amplitude: float = 1.0) -> "Signal":
        return cls(k, (amplitude,))

    @classmethod
    def from_array(cls, values: Iterable[float], start: int = 0) -> "Signal":
        return cls(start, tuple(np.asarray(list(values), dtype=float).ravel()))

    @property
    def end(self) -> int:
        """One past the last stored index."""
        return self.start + len(self.values)

    @property
    def is_zero(self) -> bool:
        return not self.values

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        if self.start <= k < self.end:
            return self.values[k - self.start]
        return 0.0

    def window(self, a: int, b: int) -> np.ndarray:
        """Dense samples on ``a..b-1`` (implicit zeros filled in)."""
        out = np.zeros(max(b - a, 0))
        lo, hi = max(a, self.start), min(b, self.end)
        if lo < hi:
            out[lo - a:hi - a] = self.values[lo - self.start:hi - self.start]
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self.values)) if self.values else 0.0

    def scaled(self, c: float) -> "Signal":
        return Signal(self.start, tuple(c * x for x in self.values))

    def __add__(self, other: "Signal") -> "Signal":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        a, b = min(self.start, other.start), max(self.end, other.end)
        return Signal.from_array(self.window(a, b) + other.window(a, b), a)

    def __sub__(self, other: "Signal") -> "Signal":
        return self + other.scaled(-1.0)

    def to_json(self) -> dict:
        return {"start": self.start, "values": list(self.values)}

    @classmethod
    def from_json(cls, data: dict) -> "Signal":
        return cls(int(data.get("start", 0)), tuple(float(x) for x in data.get("values", [])))


@dataclass(frozen=True)
class SequencePair:
    v: Signal = field(default_factory=Signal)
    w: Signal = field(default_factory=Signal)

    def span(self) -> Tuple[int, int]:
        """Smallest ``[a, b)`` covering both supports (``(0, 0)`` for the zero pair)."""
        spans = [(s.start, s.end) for s in (self.v, self.w) if not s.is_zero]
        if not spans:
            return 0, 0
        return min(a for a, _ in spans), max(b for _, b in spans)

    def dense(self, pad: int = 0) -> Tuple[int, np.ndarray, np.ndarray]:
        a, b = self.span()
        a, b = a - pad, b + pad
        return a, self.v.window(a, b), self.w.window(a, b)

    def to_json(self) -> dict:
        return {"v": self.v.to_json(), "w": self.w.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "SequencePair":
        return cls(Signal.from_json(data["v"]), Signal.from_json(data["w"]))


def inner_product(u: Signal, w: Signal) -> float:
    lo, hi = max(u.start, w.start), min(u.end, w.end)
    if lo >= hi:
        return 0.0
    return float(np.dot(u.window(lo, hi), w.window(lo, hi)))


def shift(u: Signal, tau: int) -> Signal:
    if u.is_zero:
        return u
    return Signal(u.start + tau, u.values)


def truncate(u: Signal, tau: int) -> Signal:
    """Keep samples with index ``<= tau``."""
    if u.is_zero or tau >= u.end - 1:
        return u
    return Signal.from_array(u.window(u.start, tau + 1), u.start)


def truncate_window(u: Signal, a: int, b: int) -> Signal:
    """Keep samples with index in ``[a, b]`` (both ends inclusive)."""
    if a > b:
        raise ValueError(f"empty window [{a}, {b}]")
    return Signal.from_array(u.window(a, b + 1), a)


def is_similarly_ordered(p: SequencePair) -> bool:
    """True iff ``v_i < v_j`` implies ``w_i <= w_j`` over all of Z.

    The zero tail contributes one synthetic ``(0, 0)`` sample; every implicit
    sample is identical so one stands in for all of them.
    """
    _, v, w = p.dense()
    samples = sorted(zip(np.append(v, 0.0), np.append(w, 0.0)))
    running_max = -np.inf
    for _, group in groupby(samples, key=lambda s: s[0]):
        ws = [s[1] for s in group]
        if min(ws) < running_max:
            return False
        running_max = max(running_max, max(ws))
    return True


def is_unbiased(p: SequencePair) -> bool:
    _, v, w = p.dense()
    return bool(np.all(v * w >= 0.0))
