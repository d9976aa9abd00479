import itertools
import math

import numpy as np
import pytest
from scipy import integrate, special

from closed_forms import omega2_pms_derived, rescale
from duffing_model import ModelSpec
from errors import IntegrationFailureError, UnboundedMotionError, UnsupportedModulusError
from exact_oracle import (
    EnergyModel, PeriodMethod, PeriodResult, Rk4Integrator, elliptic_k, energy_drift,
    exact_period, omega_exact, period_elliptic, period_ode, period_quadrature,
)


def _spec(omega=1.0, mu=1.0, amplitude=1.0):
    return ModelSpec(omega=omega, mu=mu, amplitude=amplitude)


GRID = [_spec(*p) for p in itertools.product((0.5, 1.0, 2.0), (0.1, 1.0, 10.0),
                                             (0.5, 1.0, 2.0, 5.0))]


# ── elliptic integral ────────────────────────────────────────────────────────

@pytest.mark.parametrize('m', [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, -0.5])
def test_elliptic_k_matches_scipy(m):
    assert elliptic_k(m) == pytest.approx(special.ellipk(m), rel=1e-13)


def test_elliptic_k_at_zero_is_half_pi():
    assert elliptic_k(0.0) == math.pi / 2


@pytest.mark.parametrize('m', [1.0, 1.5])
def test_elliptic_k_diverges(m):
    with pytest.raises(UnsupportedModulusError):
        elliptic_k(m)


# ── harmonic limit ───────────────────────────────────────────────────────────

@pytest.mark.parametrize('omega', [0.5, 1.0, 3.0])
def test_harmonic_limit(omega):
    spec = _spec(omega=omega, mu=0.0, amplitude=2.0)
    expected = 2 * math.pi / omega
    assert period_elliptic(spec).period == pytest.approx(expected, rel=1e-14)
    assert period_quadrature(spec).period == pytest.approx(expected, rel=1e-14)
    assert period_ode(spec).period == pytest.approx(expected, rel=1e-8)


# ── agreement between routes ─────────────────────────────────────────────────

@pytest.mark.parametrize('spec', GRID, ids=lambda s: f'w{s.omega}-mu{s.mu}-A{s.amplitude}')
def test_three_routes_agree(spec):
    elliptic = period_elliptic(spec)
    quad = period_quadrature(spec)
    ode = period_ode(spec)
    assert quad.period == pytest.approx(elliptic.period, rel=1e-10)
    assert ode.period == pytest.approx(quad.period, rel=1e-6)
    assert elliptic.method_tag is PeriodMethod.ELLIPTIC_AGM
    assert quad.method_tag is PeriodMethod.QUADRATURE
    assert ode.method_tag is PeriodMethod.ODE


def test_quadrature_matches_scipy_quad():
    spec = _spec(omega=1.3, mu=-0.4, amplitude=1.2)
    w2, a = spec.omega ** 2, spec.coupling
    value, _ = integrate.quad(lambda t: 1 / math.sqrt(w2 + a * (1 + math.sin(t) ** 2) / 2),
                              0, math.pi / 2, epsabs=0, epsrel=1e-13)
    assert period_quadrature(spec).period == pytest.approx(4 * value, rel=1e-12)


def test_ode_error_estimate_is_small():
    result = period_ode(_spec())
    assert 0 <= result.est_error < 1e-9 * result.period


def test_unit_case_frequency():
    assert omega_exact(_spec()) ** 2 == pytest.approx(1.73655, abs=1e-4)
    diff = abs(omega2_pms_derived(_spec()).omega_squared - omega_exact(_spec()) ** 2)
    assert diff / omega_exact(_spec()) ** 2 < 5e-4


# ── monotonicity and limits ──────────────────────────────────────────────────

def test_period_decreases_with_mu():
    periods = [exact_period(_spec(mu=mu)).period for mu in np.linspace(-0.9, 10, 40)]
    assert all(np.diff(periods) < 0)


def test_period_decreases_with_amplitude_for_hardening():
    periods = [exact_period(_spec(amplitude=a)).period for a in np.linspace(0.1, 5, 30)]
    assert all(np.diff(periods) < 0)


def test_period_grows_towards_separatrix():
    harmonic = 2 * math.pi
    near = [exact_period(_spec(mu=mu)).period for mu in (-0.9, -0.99, -0.999)]
    assert near[0] < near[1] < near[2]
    assert near[2] > 3 * harmonic


def test_quadrature_next_to_separatrix():
    spec = _spec(mu=-1 + 1e-6)
    w2, a = spec.omega ** 2, spec.coupling
    value, _ = integrate.quad(lambda t: 1 / math.sqrt(w2 + a * (1 + math.sin(t) ** 2) / 2),
                              0, math.pi / 2, epsabs=0, epsrel=1e-12, limit=500)

    result = period_quadrature(spec)
    assert math.isfinite(result.period)
    assert result.period == pytest.approx(4 * value, rel=1e-9)
    assert result.est_error < 1e-9 * result.period
    assert result.period > period_quadrature(_spec(mu=-0.9999)).period
    assert exact_period(spec).period == result.period


def test_softening_uses_quadrature():
    assert exact_period(_spec(mu=-0.5)).method_tag is PeriodMethod.QUADRATURE
    assert exact_period(_spec(mu=0.5)).method_tag is PeriodMethod.ELLIPTIC_AGM


def test_rescale_leaves_period_unchanged():
    spec = _spec(omega=1.4, mu=2.0, amplitude=0.8)
    moved = rescale(spec, 0.3)
    assert exact_period(moved).period == pytest.approx(exact_period(spec).period, rel=1e-13)


# ── errors ───────────────────────────────────────────────────────────────────

@pytest.mark.parametrize('route', [period_quadrature, period_ode, exact_period])
def test_unbounded_motion_rejected(route):
    with pytest.raises(UnboundedMotionError):
        route(_spec(mu=-2.0))


def test_separatrix_is_unbounded():
    with pytest.raises(UnboundedMotionError):
        period_quadrature(_spec(mu=-1.0))


def test_elliptic_route_rejects_softening():
    with pytest.raises(UnsupportedModulusError):
        period_elliptic(_spec(mu=-0.5))


def test_period_result_validates():
    with pytest.raises(ValueError):
        PeriodResult(0.0, PeriodMethod.ODE, 0.0)
    with pytest.raises(ValueError):
        PeriodResult(1.0, PeriodMethod.ODE, -1.0)
    assert PeriodResult(math.pi, PeriodMethod.ODE, 0.0).omega == pytest.approx(2.0)


# ── integrator ───────────────────────────────────────────────────────────────

@pytest.mark.parametrize('spec', GRID, ids=lambda s: f'w{s.omega}-mu{s.mu}-A{s.amplitude}')
def test_energy_is_conserved(spec):
    assert energy_drift(spec, periods=10) < 1e-8


def test_energy_model():
    model = EnergyModel(omega=2.0, mu=4.0)
    assert model.potential(1.0) == 3.0
    assert model.energy_of_state(1.0, 2.0) == 5.0
    assert model.acceleration(1.0) == -8.0
    assert model.energy_of_amplitude(1.0) == model.potential(1.0)


def test_rk4_matches_harmonic_motion():
    integrator = Rk4Integrator(lambda x: -x, h=1e-3)
    states = integrator.trajectory(1.0, 0.0, 1000)
    assert states.shape == (1001, 2)
    assert states[-1, 0] == pytest.approx(math.cos(1.0), abs=1e-12)
    assert states[-1, 1] == pytest.approx(-math.sin(1.0), abs=1e-12)


def test_integration_failure_without_crossing():
    from exact_oracle import _half_period
    integrator = Rk4Integrator(lambda x: -x, h=1e-2)
    with pytest.raises(IntegrationFailureError):
        _half_period(integrator, 1.0, 1.0)
