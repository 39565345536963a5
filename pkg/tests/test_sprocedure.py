import numpy as np
import pytest

from lurye_ozf.analysis.multiplier_search import ClassMode, average_to_lti
from lurye_ozf.analysis.sprocedure import (
    FOUND,
    INCONCLUSIVE,
    CertificateConfig,
    QuadraticForm,
    basis_forms,
    build_sigma0,
    build_sigmak,
    certificate_multiplier,
    certificate_search,
    combined_max_eig,
    witness_signal,
)
from lurye_ozf.core.exceptions import HorizonNotMultipleOfPeriod, UnstablePlant
from lurye_ozf.matrix.periodic_banded import BandedPeriodicPermutation, enumerate_basis, permutation_gap, validate
from lurye_ozf.signal.plant import RationalPlant
from tests.helpers import pair

SHIFT3 = BandedPeriodicPermutation(3, 1, (1, 1, 1))


def test_quadratic_form_rejects_asymmetric_and_misshapen():
    with pytest.raises(ValueError):
        QuadraticForm(1, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        QuadraticForm(2, np.eye(3))


def test_sigmak_matches_permutation_gap(rng):
    H = 6
    for perm in enumerate_basis(3, 1):
        form = build_sigmak(perm, H)
        for _ in range(5):
            p = pair(rng.normal(size=4), rng.normal(size=4), start=1)
            assert form.value(p) == pytest.approx(permutation_gap(p, perm), abs=1e-12)


def test_sigmak_needs_whole_periods():
    with pytest.raises(HorizonNotMultipleOfPeriod):
        build_sigmak(SHIFT3, 4)


@pytest.mark.parametrize("T", [3, 4, 5])
def test_witness_makes_every_constraint_positive(T):
    witness = witness_signal(T)
    for _, form in basis_forms(T, 1, T):
        assert form.value(witness) > 0.0


def test_sigma0_needs_stable_plant_and_positive_gamma():
    with pytest.raises(UnstablePlant):
        build_sigma0(RationalPlant((1.0,), (1.0, -2.0)), 1.0, 3)
    with pytest.raises(ValueError):
        build_sigma0(RationalPlant.static(0.5), 0.0, 3)


def test_sigma0_value():
    # ||w||^2 - gamma^2 ||v - G w||^2 with G = 0.5
    sigma0 = build_sigma0(RationalPlant.static(0.5), 2.0, 2)
    p = pair([1.0, 0.0], [0.0, 2.0])
    assert sigma0.value(p) == pytest.approx(4.0 - 4.0 * (1.0 + 1.0))


def test_combined_max_eig():
    assert combined_max_eig(QuadraticForm.identity(2, -1.0), [], []) == pytest.approx(-1.0)
    assert combined_max_eig(QuadraticForm(1, np.diag([2.0, -1.0])), [], []) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        combined_max_eig(QuadraticForm.identity(3), [-1.0], [build_sigmak(SHIFT3, 3)])


def planted(sigmas, alpha, H):
    return QuadraticForm(H, -0.01 * np.eye(2 * H) - sum(a * s.matrix for a, s in zip(alpha, sigmas)))


def test_search_recovers_two_planted_weights():
    sigmas = [form for _, form in basis_forms(3, 1, 3)][:2]
    result = certificate_search(planted(sigmas, (1.0, 2.0), 3), sigmas)
    assert result.found
    assert result.certificate.max_eig <= 1e-8


def test_search_recovers_planted_weights(rng):
    sigmas = [form for _, form in basis_forms(3, 1, 3)]
    for _ in range(50):
        alpha = rng.uniform(0.1, 2.0, len(sigmas))
        result = certificate_search(planted(sigmas, alpha, 3), sigmas)
        assert result.found
        assert result.status == FOUND
        assert result.certificate.iterations <= 500
        assert result.certificate.max_eig <= 1e-8
        assert all(a >= 0.0 for a in result.certificate.alpha)


def test_traceless_constraints_cannot_fix_positive_sigma0():
    sigmas = [form for _, form in basis_forms(3, 1, 3)]
    result = certificate_search(QuadraticForm.identity(3), sigmas)
    assert not result.found
    assert result.status == INCONCLUSIVE
    assert result.certificate.max_eig >= 1.0 - 1e-9
    assert result.history[0] == pytest.approx(1.0)
    # zero-diagonal constraints keep every iterate at trace / 2H = 1 or above
    assert min(result.history) >= 1.0 - 1e-9


def test_lower_bounds_stay_below_every_iterate(rng):
    sigmas = [form for _, form in basis_forms(3, 1, 3)]
    alpha = rng.uniform(0.1, 2.0, len(sigmas))
    result = certificate_search(planted(sigmas, alpha, 3), sigmas)
    assert len(result.history) == result.certificate.iterations + 1
    assert len(result.lower_history) == result.certificate.iterations
    assert all(lower <= min(result.history) + 1e-6 for lower in result.lower_history)
    # the reported certificate is the best iterate, re-evaluated
    assert result.certificate.max_eig == pytest.approx(min(result.history), abs=1e-10)
    assert result.history[-1] <= 1e-8


def test_certificate_for_negative_feedback_gain():
    sigma0 = build_sigma0(RationalPlant.static(-1.0), 10.0, 3)
    pairs = basis_forms(3, 1, 3)
    basis = [perm for perm, _ in pairs]
    result = certificate_search(sigma0, [form for _, form in pairs], CertificateConfig(alpha_max=100.0))
    assert result.found
    assert result.certificate.max_eig <= 1e-8

    M = certificate_multiplier(result.certificate, basis)
    assert validate(M).valid
    lti = average_to_lti(M)
    assert lti.mode == ClassMode.ZERO_EXCESS
    assert sum(lti.coeffs) == pytest.approx(0.0, abs=1e-12)
    assert lti.coeff(0) >= 0.0


def test_mismatched_horizons_are_rejected():
    with pytest.raises(ValueError):
        certificate_search(QuadraticForm.identity(6), [build_sigmak(SHIFT3, 3)])


def test_result_json():
    sigmas = [build_sigmak(SHIFT3, 3)]
    data = certificate_search(QuadraticForm.identity(3, -1.0), sigmas).to_json()
    assert data["found"] is True
    assert data["status"] == FOUND
    assert data["certificate"]["iterations"] == 0
