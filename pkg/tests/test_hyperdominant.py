import numpy as np
import pytest

from lurye_ozf.core.exceptions import (
    DimensionMismatch,
    NotDoublyStochastic,
    NotHyperdominant,
    NotZeroExcess,
)
from lurye_ozf.matrix.hyperdominant import (
    PermutationCombo,
    augment_zero_excess,
    bilinear_form,
    birkhoff_decompose,
    classify,
    conic_decompose,
    matrix_from_json,
    matrix_to_json,
    permutation_matrix,
)
from lurye_ozf.signal.signals import Signal
from tests.helpers import random_conic, random_doubly_stochastic

SWAP = np.array([[1.0, -1.0], [-1.0, 1.0]])


def test_classify_examples():
    c = classify(SWAP)
    assert (c.hyperdominant, c.zero_excess, c.doubly_stochastic) == (True, True, False)
    c = classify(np.eye(3))
    assert (c.hyperdominant, c.zero_excess, c.doubly_stochastic) == (True, False, True)
    c = classify(np.full((2, 2), 0.5))
    assert (c.hyperdominant, c.zero_excess, c.doubly_stochastic) == (False, False, True)


def test_classify_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        classify(np.ones((2, 3)))


def test_augment_zero_excess():
    np.testing.assert_allclose(augment_zero_excess([[1.0]]), [[1, -1], [-1, 1]])
    out = augment_zero_excess(SWAP)
    np.testing.assert_allclose(out[:2, :2], SWAP)
    np.testing.assert_allclose(out[2], 0.0)
    np.testing.assert_allclose(out[:, 2], 0.0)
    np.testing.assert_allclose(augment_zero_excess([[2, -1], [0, 1]]), [[2, -1, -1], [0, 1, -1], [-2, 0, 2]])


def test_augment_output_is_zero_excess(rng):
    for _ in range(20):
        n = int(rng.integers(1, 6))
        M = random_conic(rng, n, 3) + np.diag(rng.uniform(0, 1, n))
        c = classify(augment_zero_excess(M))
        assert c.hyperdominant and c.zero_excess


def test_augment_rejects_positive_off_diagonal():
    with pytest.raises(NotHyperdominant):
        augment_zero_excess(np.full((2, 2), 0.5))


def test_birkhoff_examples():
    combo = birkhoff_decompose(np.eye(3))
    assert combo.terms == ((1.0, (0, 1, 2)),)
    combo = birkhoff_decompose(np.full((2, 2), 0.5))
    assert sorted(combo.terms) == [(0.5, (0, 1)), (0.5, (1, 0))]


def test_birkhoff_rejects_non_stochastic():
    with pytest.raises(NotDoublyStochastic):
        birkhoff_decompose(SWAP)


def test_birkhoff_round_trip(rng):
    for _ in range(200):
        n = int(rng.integers(1, 9))
        A = random_doubly_stochastic(rng, n, int(rng.integers(1, 11)))
        combo = birkhoff_decompose(A)
        assert np.max(np.abs(combo.convex_sum(n) - A)) <= 1e-8
        assert combo.total_weight == pytest.approx(1.0, abs=1e-8)
        assert len(combo) <= (n - 1) ** 2 + 1
        assert len({p for _, p in combo.terms}) == len(combo)
        assert all(w > 0.0 for w, _ in combo.terms)


def test_conic_examples():
    assert conic_decompose(SWAP).terms == ((1.0, (1, 0)),)
    assert len(conic_decompose(np.zeros((3, 3)))) == 0


def test_conic_requires_zero_excess():
    with pytest.raises(NotZeroExcess):
        conic_decompose(np.eye(2))
    with pytest.raises(NotHyperdominant):
        conic_decompose(-SWAP)


def test_conic_round_trip(rng):
    for _ in range(50):
        M = random_conic(rng, 5, 4)
        combo = conic_decompose(M)
        assert np.max(np.abs(combo.conic_sum(5) - M)) <= 1e-8
        assert all(beta > 0.0 and p != (0, 1, 2, 3, 4) for beta, p in combo.terms)


def test_bilinear_form():
    v, w = Signal.from_array([2, 1]), Signal.from_array([3, 1])
    assert bilinear_form(SWAP, v, w) == pytest.approx(2.0)
    assert bilinear_form(np.zeros((2, 2)), v, w) == 0.0
    assert bilinear_form(np.eye(2), v, v) == pytest.approx(5.0)


def test_bilinear_form_orientation():
    M = np.array([[0.0, 1.0], [0.0, 0.0]])
    # <M v, w> = m_01 v_1 w_0
    assert bilinear_form(M, Signal.impulse(1, 2.0), Signal.impulse(0, 3.0)) == 6.0
    assert bilinear_form(M, Signal.impulse(0, 2.0), Signal.impulse(1, 3.0)) == 0.0


def test_bilinear_form_rejects_oversized_signal():
    with pytest.raises(DimensionMismatch):
        bilinear_form(SWAP, Signal.from_array([1, 2, 3]), Signal.impulse(0))


def test_rearrangement_positivity(rng):
    for _ in range(10 ** 4):
        n = int(rng.integers(2, 8))
        M = random_conic(rng, n, int(rng.integers(0, 3))) + np.diag(rng.uniform(0, 1, n) * (rng.uniform() < 0.5))
        if not np.any(M):
            continue
        v = np.sort(rng.uniform(0.1, 5, n))[::-1] + np.arange(n, 0, -1) * 1e-3
        w = np.sort(rng.uniform(0.1, 5, n))[::-1] + np.arange(n, 0, -1) * 1e-3
        assert bilinear_form(M, Signal.from_array(v), Signal.from_array(w)) > 0.0


def test_permutation_matrix_orientation():
    P = permutation_matrix([2, 0, 1])
    u = np.array([10.0, 20.0, 30.0])
    np.testing.assert_allclose(P @ u, [30.0, 10.0, 20.0])


def test_json_round_trips():
    combo = conic_decompose(SWAP)
    assert PermutationCombo.from_json(combo.to_json()) == combo
    np.testing.assert_allclose(matrix_from_json(matrix_to_json(SWAP)), SWAP)
    with pytest.raises(DimensionMismatch):
        matrix_from_json({"n": 3, "entries": SWAP.tolist()})
