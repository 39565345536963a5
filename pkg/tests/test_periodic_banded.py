import itertools

import numpy as np
import pytest

from lurye_ozf.analysis.nonlinearity import lift, random_monotone
from lurye_ozf.core.exceptions import BandInfeasible, BudgetExceeded, InvalidOperator, InvalidPermutation
from lurye_ozf.matrix.hyperdominant import classify
from lurye_ozf.matrix.periodic_banded import (
    BandedPeriodicPermutation,
    PeriodicBandedOperator,
    apply,
    combine,
    conic_decompose_periodic,
    enumerate_basis,
    fold,
    pair_in_GTB,
    permutation_gap,
    unfold,
    validate,
    violating_transposition,
)
from lurye_ozf.signal.signals import SequencePair, Signal
from tests.helpers import pair

SHIFT3 = BandedPeriodicPermutation(3, 1, (1, 1, 1))


def random_member(rng, T, B, n_terms=3, basis=None):
    if basis is None:
        basis = [p for p in enumerate_basis(T, B) if not p.is_identity]
    picks = rng.choice(len(basis), size=n_terms, replace=False)
    return combine([(float(rng.uniform(0.1, 2.0)), basis[i]) for i in picks], T, B)


def test_permutation_validation():
    with pytest.raises(InvalidPermutation):
        BandedPeriodicPermutation(3, 1, (1, 0, 0))
    with pytest.raises(InvalidPermutation):
        BandedPeriodicPermutation(3, 1, (2, 0, -2))
    with pytest.raises(InvalidPermutation):
        BandedPeriodicPermutation(3, 1, (1, -1))


def test_permutation_image_is_periodic():
    for k in range(-6, 6):
        assert SHIFT3.image(k + 3) == SHIFT3.image(k) + 3
        assert abs(SHIFT3.image(k) - k) <= 1


def test_validate_examples():
    assert validate(SHIFT3.complement()).valid
    rows = np.array(SHIFT3.complement().rows)
    rows[0, 0] = 0.1
    diagnostics = validate(PeriodicBandedOperator(3, 1, rows))
    assert diagnostics.sign_violations and not diagnostics.valid
    diagnostics = validate(PeriodicBandedOperator.zeros(2, 1))
    assert not diagnostics.period_ok
    assert "2B+1" in diagnostics.describe()


def test_operator_shape_is_checked():
    with pytest.raises(InvalidOperator):
        PeriodicBandedOperator(3, 1, np.zeros((3, 2)))


def test_fold_wraps_band_entries():
    shift4 = BandedPeriodicPermutation(4, 1, (1, 1, 1, 1))
    X = fold(shift4.complement())
    assert X[3, 0] == -1.0
    assert X[0, 1] == -1.0
    assert classify(X).zero_excess


def test_fold_block_diagonal_is_the_block():
    rows = np.zeros((3, 3))
    rows[:, 1] = [1.0, 2.0, 3.0]
    np.testing.assert_allclose(fold(PeriodicBandedOperator(3, 1, rows)), np.diag([1.0, 2.0, 3.0]))


def test_fold_unfold_inverse(rng):
    for T, B in ((3, 1), (4, 1), (5, 2)):
        M = random_member(rng, T, B)
        assert unfold(fold(M), T, B).max_abs_diff(M) == 0.0
        X = fold(M)
        np.testing.assert_allclose(fold(unfold(X, T, B)), X)


def test_unfold_identity():
    assert unfold(np.eye(4), 4, 1).max_abs_diff(PeriodicBandedOperator.identity(4, 1)) == 0.0


def test_unfold_band_infeasible():
    B, T = 1, 5
    X = np.zeros((T, T))
    X[0, B + 1] = -1.0
    with pytest.raises(BandInfeasible):
        unfold(X, T, B)


def test_fold_requires_wide_period():
    with pytest.raises(InvalidOperator):
        fold(PeriodicBandedOperator.zeros(2, 1))


def test_enumerate_basis_counts():
    assert len(enumerate_basis(3, 0)) == 1
    assert len(enumerate_basis(3, 1)) == 6
    assert len(enumerate_basis(4, 1)) == 9


def test_enumerate_basis_matches_brute_force():
    for T, B in ((3, 1), (4, 1), (5, 2)):
        brute = [
            d for d in itertools.product(range(-B, B + 1), repeat=T)
            if len({(r + x) % T for r, x in enumerate(d)}) == T
        ]
        found = [p.displacement for p in enumerate_basis(T, B)]
        assert found == sorted(brute)


def test_enumerate_basis_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_basis(4, 1, cap=5)


def test_basis_elements_are_valid():
    for T, B in ((3, 1), (4, 1), (5, 2)):
        for perm in enumerate_basis(T, B):
            assert validate(perm.complement()).valid


def test_conic_decompose_periodic_examples():
    terms = conic_decompose_periodic(SHIFT3.complement().scaled(2.0))
    assert len(terms) == 1
    assert terms[0][0] == pytest.approx(2.0)
    assert terms[0][1] == SHIFT3
    assert conic_decompose_periodic(PeriodicBandedOperator.zeros(3, 1)) == []


def test_conic_decompose_periodic_round_trip(rng):
    for T, B in ((3, 1), (4, 1), (5, 2), (7, 3)):
        basis = [p for p in enumerate_basis(T, B) if not p.is_identity]
        for _ in range(25):
            M = random_member(rng, T, B, n_terms=min(3, len(basis)), basis=basis)
            terms = conic_decompose_periodic(M)
            assert combine(terms, T, B).max_abs_diff(M) <= 1e-8
            for alpha, perm in terms:
                assert alpha > 0.0
                assert validate(perm.complement()).valid


def test_conic_decompose_periodic_rejects_invalid():
    with pytest.raises(InvalidOperator):
        conic_decompose_periodic(PeriodicBandedOperator.identity(3, 1))


def test_apply():
    u = Signal.from_array([1.0, -2.0, 0.5], 2)
    assert apply(PeriodicBandedOperator.identity(3, 1), u) == u
    assert apply(PeriodicBandedOperator.zeros(3, 1), u).is_zero
    # (P u)_k = u_{pi(k)}, so the impulse moves to the preimage of 0
    assert apply(SHIFT3.complement(), Signal.impulse(0)) == Signal(-1, (-1.0, 1.0))


def test_apply_matches_truncation(rng):
    M = random_member(rng, 4, 1)
    u = rng.standard_normal(6)
    y = apply(M, Signal.from_array(u, 1)).window(0, 8)
    full = np.zeros(8)
    full[1:7] = u
    np.testing.assert_allclose(y[1:7], (M.truncation(8) @ full)[1:7], atol=1e-12)


def test_pair_in_GTB_example():
    verdict = pair_in_GTB(pair([1, 2], [4, 1]), 3, 1)
    assert not verdict.member
    assert verdict.witness.displacement == (1, -1, 0)
    assert verdict.gap == pytest.approx(-3.0)
    assert verdict.checked == 6


def test_zero_pair_is_member():
    assert pair_in_GTB(SequencePair(), 4, 1).member


def test_monotone_pairs_are_members(rng):
    for _ in range(500):
        N = random_monotone(rng)
        v = Signal.from_array(rng.uniform(-4, 4, 6), int(rng.integers(-3, 3)))
        p = SequencePair(v, lift(N, v))
        for T, B in ((3, 1), (4, 1)):
            assert pair_in_GTB(p, T, B).member


def test_disordered_pairs_are_rejected(rng):
    for _ in range(500):
        v = rng.standard_normal(5)
        p = pair(v, -v, int(rng.integers(-3, 3)))
        verdict = pair_in_GTB(p, 3, 1)
        assert not verdict.member
        pi = verdict.witness
        direct = sum((p.v[k] - p.v[pi.image(k)]) * p.w[k] for k in range(p.w.start, p.w.end))
        assert direct == pytest.approx(verdict.gap)
        assert direct < 0.0


def test_membership_nests(rng):
    for _ in range(100):
        p = pair(rng.integers(-2, 3, 5), rng.integers(-2, 3, 5))
        if pair_in_GTB(p, 6, 1).member:
            assert pair_in_GTB(p, 3, 1).member
        if pair_in_GTB(p, 5, 2).member:
            assert pair_in_GTB(p, 5, 1).member


def test_violating_transposition():
    assert violating_transposition(pair([1, 2], [1, 4]), 1) is None
    p = pair([1, 2], [4, 1])
    perm = violating_transposition(p, 1)
    assert perm.image(0) == 1 and perm.image(1) == 0
    assert permutation_gap(p, perm) == pytest.approx(-3.0)


def test_violating_transposition_is_band_limited():
    p = pair([1, 1, 2], [3, 1, 1])
    assert violating_transposition(p, 1) is None
    perm = violating_transposition(p, 2)
    assert perm.image(0) == 2 and perm.image(2) == 0
    assert permutation_gap(p, perm) < 0.0


def test_json_round_trips():
    M = SHIFT3.complement()
    assert PeriodicBandedOperator.from_json(M.to_json()).max_abs_diff(M) == 0.0
    assert BandedPeriodicPermutation.from_json(SHIFT3.to_json()) == SHIFT3
    with pytest.raises(InvalidOperator):
        PeriodicBandedOperator.from_json({"T": 3})
