import math

import pytest

from closed_forms import (
    alpha_coeffs, omega2_order1, omega2_order3, omega2_pms_derived, omega2_pms_printed,
    pms_lambda, rescale,
)
from conftest import random_specs
from duffing_model import MethodTag, ModelSpec
from errors import PmsUndefinedError, RescaleError


def _spec(omega=1.0, mu=1.0, amplitude=1.0, lambda_=0.0):
    return ModelSpec(omega=omega, mu=mu, amplitude=amplitude, lambda_=lambda_)


def test_alpha_coefficients_plain_lp():
    alphas = alpha_coeffs(_spec(amplitude=2.0))
    assert alphas == pytest.approx((1.0, 3.0, -0.375, 1.125), rel=1e-15)


def test_alpha_coefficients_with_lambda():
    alpha0, alpha1, alpha2, alpha3 = alpha_coeffs(_spec(lambda_=1.0))
    assert alpha0 == 2.0
    assert alpha1 == pytest.approx(-0.25)
    assert alpha2 == pytest.approx(-3 / 256)
    assert alpha3 == pytest.approx(3 * (3 - 4) / (512 * 4))


def test_order_one_ignores_lambda(rng):
    for spec in random_specs(rng, 20):
        expected = spec.omega ** 2 + 0.75 * spec.coupling
        assert omega2_order1(spec).omega_squared == pytest.approx(expected, rel=1e-14)


def test_order_three_at_zero_lambda_is_plain_lp():
    result = omega2_order3(_spec())
    assert result.omega_squared == pytest.approx(1 + 3 / 4 - 3 / 128 + 9 / 512, rel=1e-15)
    assert result.method_tag is MethodTag.LP
    assert len(result.partials) == 4


def test_pms_lambda_value():
    assert pms_lambda(_spec(mu=3.0, amplitude=2.0)) == pytest.approx(3.0, rel=1e-15)


def test_pms_lambda_undefined_for_softening():
    with pytest.raises(PmsUndefinedError):
        pms_lambda(_spec(mu=-0.5))


def test_pms_lambda_is_stationary(rng):
    for spec in random_specs(rng, 20):
        lam = pms_lambda(spec)
        h = 1e-5 * (1 + lam)
        up = omega2_order3(spec.with_lambda(lam + h)).omega_squared
        down = omega2_order3(spec.with_lambda(lam - h)).omega_squared
        slope = (up - down) / (2 * h)
        assert abs(slope) < 1e-6 * max(1.0, omega2_order3(spec).omega_squared)


def test_derived_pms_frequency_unit_case():
    result = omega2_pms_derived(_spec())
    assert result.omega_squared == pytest.approx(389 / 224, rel=1e-15)
    assert result.lambda_used == pytest.approx(math.sqrt(0.75))
    assert result.method_tag is MethodTag.LPLDE_PMS
    assert result.partials[-1] == result.omega_squared


def test_derived_pms_frequency_equals_order_three_at_pms_lambda(rng):
    for spec in random_specs(rng, 50):
        at_pms = omega2_order3(spec.with_lambda(pms_lambda(spec))).omega_squared
        assert omega2_pms_derived(spec).omega_squared == pytest.approx(at_pms, rel=1e-13)


def test_printed_pms_frequency_unit_case():
    printed = omega2_pms_printed(_spec())
    assert printed.omega_squared == pytest.approx(384 / 224, rel=1e-15)
    derived = omega2_pms_derived(_spec())
    assert derived.omega_squared - printed.omega_squared == pytest.approx(5 / 224, rel=1e-12)


def test_printed_pms_frequency_for_softening_has_zero_lambda():
    assert omega2_pms_printed(_spec(mu=-0.5)).lambda_used == 0.0


def test_large_amplitude_ratio():
    spec = _spec(amplitude=1e4)
    assert omega2_pms_derived(spec).omega_squared / spec.coupling == pytest.approx(23 / 32, rel=1e-6)


def test_rescale_keeps_coupling():
    spec = rescale(_spec(mu=4.0), 1.0)
    assert spec.mu == 1.0
    assert spec.amplitude == pytest.approx(2.0, rel=1e-15)


def test_rescale_to_same_coupling_is_identity():
    spec = _spec(mu=2.5, amplitude=0.7)
    assert rescale(spec, 2.5) == spec


@pytest.mark.parametrize('mu, mu_new', [(1.0, -1.0), (-2.0, 3.0), (0.0, 1.0), (1.0, 0.0)])
def test_rescale_rejects_sign_change_and_zero(mu, mu_new):
    with pytest.raises(RescaleError):
        rescale(_spec(mu=mu), mu_new)


def test_frequencies_invariant_under_rescale(rng):
    for spec in random_specs(rng, 20):
        moved = rescale(spec, rng.uniform(0.1, 5))
        for fn in (omega2_order1, omega2_order3, omega2_pms_derived, omega2_pms_printed):
            assert fn(moved).omega_squared == pytest.approx(fn(spec).omega_squared, rel=1e-12)


def test_softening_rescale_keeps_coupling():
    spec = rescale(_spec(mu=-0.5, amplitude=1.0), -2.0)
    assert spec.coupling == pytest.approx(-0.5, rel=1e-15)


def test_third_correction_vanishes_at_pms_lambda():
    spec = _spec(lambda_=math.sqrt(0.75))
    assert alpha_coeffs(spec)[3] == pytest.approx(0.0, abs=1e-15)
