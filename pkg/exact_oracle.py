"""
Exact Period of the Duffing Oscillator

Three independent routes to the period of x'' + omega^2 x = -mu x^3 started
at rest from x = A: the complete elliptic integral via the arithmetic-geometric
mean, Gauss-Legendre quadrature of the energy integral, and direct RK4
integration of the equation of motion.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from duffing_model import ModelSpec
from errors import IntegrationFailureError, UnboundedMotionError, UnsupportedModulusError

logger = logging.getLogger(__name__)

GAUSS_ORDER = 64
QUAD_RTOL = 1e-14
MAX_PANELS = 20000
ROUNDOFF_FACTOR = 100
AGM_RTOL = 1e-15
AGM_MAX_ITER = 64
STEPS_PER_PERIOD = 2000
CROSSING_XTOL = 1e-15

_NODES, _WEIGHTS = leggauss(GAUSS_ORDER)


class PeriodMethod(str, Enum):
    ELLIPTIC_AGM = 'ELLIPTIC_AGM'
    QUADRATURE = 'QUADRATURE'
    ODE = 'ODE'


@dataclass(frozen=True)
class PeriodResult:
    period: float
    method_tag: PeriodMethod
    est_error: float

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if not self.est_error >= 0:
            raise ValueError(f"error estimate must be non-negative, got {self.est_error}")

    @property
    def omega(self) -> float:
        return 2 * math.pi / self.period


@dataclass(frozen=True)
class EnergyModel:
    """E = v^2/2 + V(x) with V(x) = omega^2 x^2 / 2 + mu x^4 / 4"""
    omega: float
    mu: float

    @classmethod
    def from_spec(cls, spec: ModelSpec) -> 'EnergyModel':
        return cls(spec.omega, spec.mu)

    def potential(self, x):
        return self.omega ** 2 * x ** 2 / 2 + self.mu * x ** 4 / 4

    def energy_of_amplitude(self, amplitude: float) -> float:
        """Total energy of the motion released at rest from x = amplitude"""
        return self.potential(amplitude)

    def energy_of_state(self, x, v):
        return v ** 2 / 2 + self.potential(x)

    def acceleration(self, x):
        return -self.omega ** 2 * x - self.mu * x ** 3


def _require_bounded(spec: ModelSpec):
    if not spec.is_bounded:
        raise UnboundedMotionError(
            f"omega^2 + mu A^2 = {spec.omega ** 2 + spec.mu * spec.amplitude ** 2:g} <= 0")


def _gauss_panel(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> float:
    half = (hi - lo) / 2
    return float(half * np.dot(_WEIGHTS, fn(lo + half * (_NODES + 1))))


def _adaptive_gauss(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                    tol: float) -> Tuple[float, float]:
    """
    Compare each panel against its two halves and split where they disagree.

    A panel of width w may contribute an error of tol * w / (hi - lo), so the
    whole integral shares one budget. Differences at the round-off level of
    the panel sums are accepted as converged, and the panel count is capped.
    """
    width = hi - lo
    pending = [(lo, hi, _gauss_panel(fn, lo, hi))]
    total, err, panels = 0.0, 0.0, 1
    while pending:
        a, b, coarse = pending.pop()
        mid = (a + b) / 2
        left = _gauss_panel(fn, a, mid)
        right = _gauss_panel(fn, mid, b)
        panels += 2
        refined = left + right
        diff = abs(refined - coarse)
        budget = tol * (b - a) / width
        noise = ROUNDOFF_FACTOR * np.finfo(float).eps * (abs(left) + abs(right))
        if diff <= max(budget, noise) or panels >= MAX_PANELS:
            total += refined
            err += diff
            continue
        pending.append((a, mid, left))
        pending.append((mid, b, right))
    if panels >= MAX_PANELS:
        logger.warning("quadrature stopped at the %d panel limit (error estimate %.3g)",
                       MAX_PANELS, err)
    return total, err


def period_quadrature(spec: ModelSpec) -> PeriodResult:
    """
    T = 4 int_0^{pi/2} dtheta / sqrt(omega^2 + mu A^2 (1 + sin^2 theta) / 2)

    x = A sin(theta) removes the inverse square root singularity at the turning
    points of T = 2 int dx / sqrt(2 (E - V(x))).
    """
    _require_bounded(spec)
    w2 = spec.omega ** 2
    a = spec.coupling

    def integrand(theta):
        return 1.0 / np.sqrt(w2 + a * (1 + np.sin(theta) ** 2) / 2)

    upper = math.pi / 2
    tol = QUAD_RTOL * _gauss_panel(integrand, 0.0, upper)
    value, err = _adaptive_gauss(integrand, 0.0, upper, tol)
    logger.debug("quadrature period %.15g (error estimate %.3g)", 4 * value, 4 * err)
    return PeriodResult(4 * value, PeriodMethod.QUADRATURE, 4 * err)


def _agm_elliptic_k(m: float) -> Tuple[float, float]:
    """K(m) = pi / (2 AGM(1, sqrt(1 - m))) and the final relative gap"""
    a, b = 1.0, math.sqrt(1.0 - m)
    gap = abs(a - b) / a
    for _ in range(AGM_MAX_ITER):
        if gap <= AGM_RTOL:
            break
        a, b = (a + b) / 2, math.sqrt(a * b)
        gap = abs(a - b) / a
    return math.pi / (2 * a), gap


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter m = k^2 < 1"""
    if not m < 1:
        raise UnsupportedModulusError(f"K(m) diverges for m = {m} >= 1")
    return _agm_elliptic_k(m)[0]


def period_elliptic(spec: ModelSpec) -> PeriodResult:
    """T = 4 K(k) / sqrt(omega^2 + mu A^2), k^2 = mu A^2 / (2 (omega^2 + mu A^2))"""
    if spec.mu < 0:
        raise UnsupportedModulusError(f"elliptic route needs mu >= 0, got {spec.mu}")
    c = spec.omega ** 2 + spec.coupling
    m = spec.coupling / (2 * c)
    K, gap = _agm_elliptic_k(m)
    period = 4 * K / math.sqrt(c)
    return PeriodResult(period, PeriodMethod.ELLIPTIC_AGM, period * max(gap, AGM_RTOL))


class Rk4Integrator:
    """Classic fourth order Runge-Kutta for x'' = acceleration(x)"""

    def __init__(self, acceleration: Callable[[float], float], h: float):
        """
        Args:
            acceleration: Force per unit mass as a function of position
            h: Fixed step size
        """
        self.acceleration = acceleration
        self.h = h

    def advance(self, x: float, v: float, h: float = None) -> Tuple[float, float]:
        """One step of size h (the fixed step when omitted)"""
        h = self.h if h is None else h
        acc = self.acceleration
        k1x, k1v = v, acc(x)
        k2x, k2v = v + 0.5 * h * k1v, acc(x + 0.5 * h * k1x)
        k3x, k3v = v + 0.5 * h * k2v, acc(x + 0.5 * h * k2x)
        k4x, k4v = v + h * k3v, acc(x + h * k3x)
        return (x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x),
                v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v))

    def trajectory(self, x: float, v: float, num_steps: int) -> np.ndarray:
        """States (x, v) after 0..num_steps steps"""
        states = np.empty((num_steps + 1, 2))
        states[0] = x, v
        for i in range(num_steps):
            x, v = self.advance(x, v)
            states[i + 1] = x, v
        return states


def _half_period(integrator: Rk4Integrator, amplitude: float, max_time: float) -> float:
    """First time the velocity crosses zero upwards with x < 0"""
    x, v, t = amplitude, 0.0, 0.0
    h = integrator.h
    for _ in range(int(math.ceil(max_time / h))):
        x_new, v_new = integrator.advance(x, v)
        if v < 0 <= v_new and x_new < 0:
            # root of the velocity after a partial step from the bracket start
            s = brentq(lambda sub: integrator.advance(x, v, sub)[1], 0.0, h, xtol=CROSSING_XTOL)
            return t + s
        x, v, t = x_new, v_new, t + h
    raise IntegrationFailureError(f"no half-period crossing within t = {max_time:g}")


def period_ode(spec: ModelSpec, steps_per_period: int = STEPS_PER_PERIOD) -> PeriodResult:
    """
    Period from direct integration of the equation of motion.

    The step is T_est / steps_per_period with T_est from quadrature; the error
    estimate is the Richardson difference against a run at twice the step.
    """
    _require_bounded(spec)
    t_est = period_quadrature(spec).period
    acceleration = EnergyModel.from_spec(spec).acceleration
    h = t_est / steps_per_period

    period = 2 * _half_period(Rk4Integrator(acceleration, h), spec.amplitude, 3 * t_est)
    coarse = 2 * _half_period(Rk4Integrator(acceleration, 2 * h), spec.amplitude, 3 * t_est)
    return PeriodResult(period, PeriodMethod.ODE, abs(period - coarse) / 15)


def energy_drift(spec: ModelSpec, periods: int = 10,
                 steps_per_period: int = STEPS_PER_PERIOD) -> float:
    """Largest relative energy deviation along an RK4 run of the given length"""
    _require_bounded(spec)
    t_est = period_quadrature(spec).period
    model = EnergyModel.from_spec(spec)
    integrator = Rk4Integrator(model.acceleration, t_est / steps_per_period)
    states = integrator.trajectory(spec.amplitude, 0.0, periods * steps_per_period)
    e0 = model.energy_of_amplitude(spec.amplitude)
    energies = model.energy_of_state(states[:, 0], states[:, 1])
    return float(np.max(np.abs(energies - e0)) / abs(e0))


def exact_period(spec: ModelSpec) -> PeriodResult:
    """Elliptic route for mu >= 0, quadrature otherwise"""
    if spec.mu >= 0:
        return period_elliptic(spec)
    return period_quadrature(spec)


def omega_exact(spec: ModelSpec) -> float:
    return exact_period(spec).omega
