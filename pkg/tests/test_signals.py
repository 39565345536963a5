import itertools

import numpy as np
import pytest

from lurye_ozf.analysis.nonlinearity import lift, random_monotone
from lurye_ozf.signal.signals import (
    SequencePair,
    Signal,
    inner_product,
    is_similarly_ordered,
    is_unbiased,
    shift,
    truncate,
    truncate_window,
)
from tests.helpers import pair


def test_canonical_form_trims_zeros():
    assert Signal(0, (0.0, 1.0, 0.0)) == Signal(1, (1.0,))
    assert Signal(5, (0.0, 0.0)).is_zero
    assert Signal(5, (0.0,)) == Signal.zero()


def test_inner_product():
    assert inner_product(Signal.impulse(0), Signal.impulse(0)) == 1.0
    assert inner_product(Signal.impulse(0), Signal.impulse(1)) == 0.0
    assert inner_product(Signal.from_array([1, 2]), Signal.from_array([3, -1])) == 1.0


def test_shift():
    u = Signal.from_array([1.0, -2.0, 3.0], -1)
    assert shift(Signal.impulse(0), 3) == Signal.impulse(3)
    assert shift(u, 0) == u
    assert shift(shift(u, 2), -2) == u


def test_shift_is_an_isometry(rng):
    u = Signal.from_array(rng.standard_normal(6), 2)
    w = Signal.from_array(rng.standard_normal(5), 4)
    for tau in (-7, 0, 3):
        assert inner_product(shift(u, tau), shift(w, tau)) == pytest.approx(inner_product(u, w))


def test_truncate():
    u = Signal.from_array([1, 2, 3])
    assert truncate(u, 1) == Signal.from_array([1, 2])
    assert truncate(truncate(u, 1), 1) == truncate(u, 1)
    assert truncate_window(Signal.from_array([1, 2, 3], -1), 0, 1) == Signal.from_array([2, 3])


def test_truncate_window_rejects_empty_range():
    with pytest.raises(ValueError):
        truncate_window(Signal.impulse(0), 2, 1)


def test_truncated_norm_grows_to_full_norm(rng):
    u = Signal.from_array(rng.standard_normal(10), -3)
    norms = [truncate(u, tau).norm() for tau in range(-4, 8)]
    assert all(a <= b for a, b in zip(norms, norms[1:]))
    assert norms[-1] == pytest.approx(u.norm())


def test_similarly_ordered_examples():
    assert is_similarly_ordered(pair([1, 2], [1, 4]))
    assert not is_similarly_ordered(pair([1, 2], [4, 1]))
    assert is_similarly_ordered(pair([0, 1], [-1, 0]))


def _brute_force_ordered(p: SequencePair) -> bool:
    a, b = p.span()
    idx = range(a - 2, b + 2)
    return all(
        not (p.v[i] < p.v[j]) or p.w[i] <= p.w[j]
        for i, j in itertools.product(idx, idx)
    )


def test_similarly_ordered_matches_brute_force(rng):
    for _ in range(300):
        n = int(rng.integers(1, 6))
        p = pair(rng.integers(-2, 3, n), rng.integers(-2, 3, n), int(rng.integers(-3, 3)))
        assert is_similarly_ordered(p) == _brute_force_ordered(p)


def test_unbiased_examples():
    assert is_unbiased(pair([1, -2], [1, -3]))
    assert not is_unbiased(pair([1], [-1]))
    assert is_unbiased(pair([0], [5]))


def test_monotone_images_are_ordered_and_unbiased(rng):
    for _ in range(50):
        N = random_monotone(rng)
        v = Signal.from_array(rng.uniform(-4, 4, 8), int(rng.integers(-5, 5)))
        p = SequencePair(v, lift(N, v))
        assert is_similarly_ordered(p)
        assert is_unbiased(p)


def test_similarly_ordered_implies_unbiased(rng):
    for _ in range(300):
        p = pair(rng.integers(-2, 3, 4), rng.integers(-2, 3, 4))
        if is_similarly_ordered(p):
            assert is_unbiased(p)


def test_json_round_trip():
    p = pair([1.5, 0, -2], [3, 1, 0], start=-2)
    assert SequencePair.from_json(p.to_json()) == p
