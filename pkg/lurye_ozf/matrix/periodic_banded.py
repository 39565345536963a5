"""T-periodic, B-banded doubly infinite operators and the permutation basis
``C^{T,B} = {I - P : P periodic, |pi(k) - k| <= B}``.

One period is stored as ``rows[r, o + B] = m_{r, r + o}`` for residues
``r = 0..T-1`` and offsets ``o = -B..B``; ``m_{i+T, j+T} = m_{i, j}``.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from lurye_ozf.core.exceptions import (
    BandInfeasible,
    BudgetExceeded,
    InvalidOperator,
    InvalidPermutation,
)
from lurye_ozf.matrix.hyperdominant import CLASS_TOL, conic_decompose
from lurye_ozf.signal.signals import SequencePair, Signal

logger = logging.getLogger(__name__)

DEFAULT_ENUM_CAP = 10 ** 6
MEMBERSHIP_TOL = -1e-12


@dataclass(frozen=True, eq=False)
class PeriodicBandedOperator:
    T: int
    B: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if self.T < 1 or self.B < 0:
            raise InvalidOperator(f"need T >= 1 and B >= 0, got T={self.T}, B={self.B}")
        if rows.shape != (self.T, 2 * self.B + 1):
            raise InvalidOperator(f"rows must be {self.T}x{2 * self.B + 1}, got {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InvalidOperator("rows have non-finite entries")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def zeros(cls, T: int, B: int) -> "PeriodicBandedOperator":
        return cls(T, B, np.zeros((T, 2 * B + 1)))

    @classmethod
    def identity(cls, T: int, B: int) -> "PeriodicBandedOperator":
        rows = np.zeros((T, 2 * B + 1))
        rows[:, B] = 1.0
        return cls(T, B, rows)

    def entry(self, i: int, j: int) -> float:
        o = j - i
        if abs(o) > self.B:
            return 0.0
        return float(self.rows[i % self.T, o + self.B])

    def truncation(self, H: int, start: int = 0) -> np.ndarray:
        """``H x H`` window of the infinite matrix on indices ``start..start+H-1``."""
        out = np.zeros((H, H))
        for i in range(H):
            for o in range(-self.B, self.B + 1):
                j = i + o
                if 0 <= j < H:
                    out[i, j] = self.rows[(start + i) % self.T, o + self.B]
        return out

    def __add__(self, other: "PeriodicBandedOperator") -> "PeriodicBandedOperator":
        _check_same_shape(self, other)
        return PeriodicBandedOperator(self.T, self.B, self.rows + other.rows)

    def __sub__(self, other: "PeriodicBandedOperator") -> "PeriodicBandedOperator":
        _check_same_shape(self, other)
        return PeriodicBandedOperator(self.T, self.B, self.rows - other.rows)

    def scaled(self, c: float) -> "PeriodicBandedOperator":
        return PeriodicBandedOperator(self.T, self.B, c * self.rows)

    def max_abs_diff(self, other: "PeriodicBandedOperator") -> float:
        _check_same_shape(self, other)
        return float(np.max(np.abs(self.rows - other.rows)))

    def to_json(self) -> dict:
        return {"T": self.T, "B": self.B, "rows": self.rows.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "PeriodicBandedOperator":
        try:
            return cls(int(data["T"]), int(data["B"]), np.asarray(data["rows"], dtype=float))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidOperator(f"malformed operator: {e}")


def _check_same_shape(a: PeriodicBandedOperator, b: PeriodicBandedOperator):
    if (a.T, a.B) != (b.T, b.B):
        raise InvalidOperator(f"shape mismatch: (T={a.T}, B={a.B}) vs (T={b.T}, B={b.B})")


@dataclass(frozen=True)
class BandedPeriodicPermutation:
    """``pi(k) = k + d(k mod T)`` with ``|d| <= B``; ``P`` has its one at ``(k, pi(k))``."""

    T: int
    B: int
    displacement: Tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(x) for x in self.displacement)
        object.__setattr__(self, "displacement", d)
        if len(d) != self.T:
            raise InvalidPermutation(f"need {self.T} displacements, got {len(d)}")
        if any(abs(x) > self.B for x in d):
            raise InvalidPermutation(f"displacement {d} leaves the band B={self.B}")
        if len({(r + x) % self.T for r, x in enumerate(d)}) != self.T:
            raise InvalidPermutation(f"displacement {d} is not a bijection mod {self.T}")

    @classmethod
    def identity(cls, T: int, B: int) -> "BandedPeriodicPermutation":
        return cls(T, B, (0,) * T)

    @classmethod
    def from_residue_perm(cls, perm: Sequence[int], T: int, B: int) -> "BandedPeriodicPermutation":
        """Unfold a permutation of residues into the band."""
        d = []
        for r, c in enumerate(perm):
            offsets = [o for o in range(-B, B + 1) if (r + o) % T == c]
            if not offsets:
                raise BandInfeasible(f"residue {r} -> {c} has no offset within B={B} for T={T}")
            d.append(offsets[0])
        return cls(T, B, tuple(d))

    @property
    def is_identity(self) -> bool:
        return not any(self.displacement)

    def image(self, k: int) -> int:
        return k + self.displacement[k % self.T]

    def residue_perm(self) -> Tuple[int, ...]:
        return tuple((r + x) % self.T for r, x in enumerate(self.displacement))

    def to_operator(self) -> PeriodicBandedOperator:
        rows = np.zeros((self.T, 2 * self.B + 1))
        rows[np.arange(self.T), np.asarray(self.displacement) + self.B] = 1.0
        return PeriodicBandedOperator(self.T, self.B, rows)

    def complement(self) -> PeriodicBandedOperator:
        """``I - P``."""
        return PeriodicBandedOperator.identity(self.T, self.B) - self.to_operator()

    def truncation(self, H: int) -> np.ndarray:
        return self.to_operator().truncation(H)

    def to_json(self) -> dict:
        return {"T": self.T, "B": self.B, "displacement": list(self.displacement)}

    @classmethod
    def from_json(cls, data: dict) -> "BandedPeriodicPermutation":
        return cls(int(data["T"]), int(data["B"]), tuple(data["displacement"]))


@dataclass
class Diagnostics:
    T: int
    B: int
    period_ok: bool
    sign_violations: List[Tuple[int, int, float]] = field(default_factory=list)
    row_excess: List[float] = field(default_factory=list)
    col_excess: List[float] = field(default_factory=list)

    @property
    def excess_ok(self) -> bool:
        return all(abs(x) <= CLASS_TOL for x in self.row_excess + self.col_excess)

    @property
    def valid(self) -> bool:
        return self.period_ok and not self.sign_violations and self.excess_ok

    def describe(self) -> str:
        problems = []
        if not self.period_ok:
            problems.append(f"T={self.T} < 2B+1={2 * self.B + 1}")
        if self.sign_violations:
            problems.append(f"{len(self.sign_violations)} positive off-diagonal entries")
        if not self.excess_ok:
            worst = max(abs(x) for x in self.row_excess + self.col_excess)
            problems.append(f"row/column excess up to {worst:.3e}")
        return "; ".join(problems) or "valid"

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "B": self.B,
            "period_ok": self.period_ok,
            "sign_violations": [list(v) for v in self.sign_violations],
            "row_excess": self.row_excess,
            "col_excess": self.col_excess,
            "valid": self.valid,
        }


def column_sums(M: PeriodicBandedOperator) -> np.ndarray:
    """Column sums per residue: column ``c`` collects ``m_{c-o, c}`` over offsets."""
    T, B = M.T, M.B
    sums = np.zeros(T)
    for c in range(T):
        for o in range(-B, B + 1):
            sums[c] += M.rows[(c - o) % T, o + B]
    return sums


def validate(M: PeriodicBandedOperator) -> Diagnostics:
    T, B = M.T, M.B
    violations = [
        (r, o, float(M.rows[r, o + B]))
        for r in range(T)
        for o in range(-B, B + 1)
        if o != 0 and M.rows[r, o + B] > 0.0
    ]
    return Diagnostics(
        T=T,
        B=B,
        period_ok=T >= 2 * B + 1,
        sign_violations=violations,
        row_excess=M.rows.sum(axis=1).tolist(),
        col_excess=column_sums(M).tolist(),
    )


def _require_period(T: int, B: int):
    if T < 2 * B + 1:
        raise InvalidOperator(f"need T >= 2B+1, got T={T}, B={B}")


def fold(M: PeriodicBandedOperator) -> np.ndarray:
    """Translate each band entry into column ``(r + o) mod T`` of a ``T x T`` matrix."""
    _require_period(M.T, M.B)
    T, B = M.T, M.B
    out = np.zeros((T, T))
    for r in range(T):
        for o in range(-B, B + 1):
            out[r, (r + o) % T] += M.rows[r, o + B]
    return out


def unfold(X, T: int, B: int) -> PeriodicBandedOperator:
    _require_period(T, B)
    X = np.asarray(X, dtype=float)
    if X.shape != (T, T):
        raise InvalidOperator(f"expected a {T}x{T} matrix, got {X.shape}")
    rows = np.zeros((T, 2 * B + 1))
    for r in range(T):
        for c in range(T):
            if X[r, c] == 0.0:
                continue
            offsets = [o for o in range(-B, B + 1) if (r + o) % T == c]
            if not offsets:
                raise BandInfeasible(f"entry ({r}, {c}) = {X[r, c]} has no congruent column within B={B}")
            rows[r, offsets[0] + B] = X[r, c]
    return PeriodicBandedOperator(T, B, rows)


def enumerate_basis(T: int, B: int, cap: int = DEFAULT_ENUM_CAP) -> List[BandedPeriodicPermutation]:
    """Every banded periodic permutation, lexicographic in the displacement vector."""
    _require_period(T, B)
    found: List[BandedPeriodicPermutation] = []
    d = [0] * T
    used = [False] * T

    def extend(r: int):
        if r == T:
            if len(found) >= cap:
                raise BudgetExceeded(f"more than {cap} permutations for T={T}, B={B}")
            found.append(BandedPeriodicPermutation(T, B, tuple(d)))
            return
        for o in range(-B, B + 1):
            c = (r + o) % T
            if used[c]:
                continue
            used[c] = True
            d[r] = o
            extend(r + 1)
            used[c] = False

    extend(0)
    logger.debug(f"enumerated {len(found)} permutations for T={T}, B={B}")
    return found


def combine(terms: Sequence[Tuple[float, BandedPeriodicPermutation]], T: int, B: int) -> PeriodicBandedOperator:
    """``sum alpha_k (I - P_k)``."""
    out = PeriodicBandedOperator.zeros(T, B)
    for alpha, perm in terms:
        out = out + perm.complement().scaled(alpha)
    return out


def conic_decompose_periodic(M: PeriodicBandedOperator) -> List[Tuple[float, BandedPeriodicPermutation]]:
    diagnostics = validate(M)
    if not diagnostics.valid:
        raise InvalidOperator(f"operator is not in the multiplier class: {diagnostics.describe()}")
    combo = conic_decompose(fold(M))
    terms = [(beta, BandedPeriodicPermutation.from_residue_perm(perm, M.T, M.B)) for beta, perm in combo.terms]
    logger.info(f"decomposed T={M.T}, B={M.B} operator into {len(terms)} basis elements")
    return terms


def apply(M: PeriodicBandedOperator, u: Signal) -> Signal:
    """``y_i = sum_o m_{i, i+o} u_{i+o}`` over the support widened by B."""
    if u.is_zero:
        return u
    B = M.B
    a, b = u.start - B, u.end + B
    x = u.window(a - B, b + B)
    idx = np.arange(a, b)
    y = np.zeros(b - a)
    for o in range(-B, B + 1):
        y += M.rows[idx % M.T, o + B] * x[idx - a + B + o]
    return Signal.from_array(y, a)


def permutation_gap(p: SequencePair, perm: BandedPeriodicPermutation) -> float:
    """``sum_k v_k w_k - sum_k v_{pi(k)} w_k = <(I - P) v, w>``."""
    if p.w.is_zero:
        return 0.0
    idx = np.arange(p.w.start, p.w.end)
    images = idx + np.asarray(perm.displacement)[idx % perm.T]
    w = np.asarray(p.w.values)
    v_here = np.array([p.v[k] for k in idx])
    v_there = np.array([p.v[int(k)] for k in images])
    return float(np.dot(v_here - v_there, w))


@dataclass
class MembershipVerdict:
    member: bool
    witness: Optional[BandedPeriodicPermutation]
    gap: float
    checked: int

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "witness": self.witness.to_json() if self.witness else None,
            "gap": self.gap,
            "checked": self.checked,
        }


def pair_in_GTB(p: SequencePair, T: int, B: int, cap: int = DEFAULT_ENUM_CAP) -> MembershipVerdict:
    basis = enumerate_basis(T, B, cap)
    worst, worst_gap = None, 0.0
    for perm in basis:
        if perm.is_identity:
            continue
        gap = permutation_gap(p, perm)
        if gap < worst_gap:
            worst, worst_gap = perm, gap
    member = worst_gap >= MEMBERSHIP_TOL
    if not member:
        logger.debug(f"pair outside G^(T={T},B={B}); witness {worst.displacement} gap {worst_gap:.3e}")
    return MembershipVerdict(member, None if member else worst, worst_gap, len(basis))


def violating_transposition(p: SequencePair, B: int) -> Optional[BandedPeriodicPermutation]:
    """Lift the first pair ``k < l <= k + B`` with ``(v_k - v_l)(w_k - w_l) < 0``.

    The period is chosen wide enough that the other copies of the
    transposition miss the pair's support, so the lifted gap equals the
    pairwise product.
    """
    if B < 1:
        return None
    a, v, w = p.dense(pad=B)
    n = v.size
    for k in range(n):
        for l in range(k + 1, min(k + B, n - 1) + 1):
            if (v[k] - v[l]) * (w[k] - w[l]) < 0.0:
                T = max(2 * B + 1, n + 2 * B + 1)
                d = [0] * T
                rk, rl = (a + k) % T, (a + l) % T
                d[rk], d[rl] = l - k, k - l
                return BandedPeriodicPermutation(T, B, tuple(d))
    return None
