"""
Closed-Form Third Order Results for the Duffing Oscillator

Explicit frequency corrections, solutions and PMS frequencies of the
Lindstedt-Poincare expansion with linear delta interpolation. Everything
depends on A and mu only through a = A^2 mu (besides the overall A of the
solutions), with D = omega^2 + lambda^2 and L = lambda^2.
"""

import math
from dataclasses import replace
from typing import List, Tuple

from duffing_model import FrequencyResult, MethodTag, ModelSpec, tag_for_lambda
from errors import PmsUndefinedError, RescaleError
from trigseries import CosineSeries

__all__ = [
    'FrequencyResult', 'MethodTag', 'alpha_coeffs', 'omega2_order1', 'omega2_order3',
    'pms_lambda', 'omega2_pms_derived', 'omega2_pms_printed', 'rescale',
    'solutions_order3', 'driving_order3',
]


def _parts(spec: ModelSpec) -> Tuple[float, float, float, float]:
    """(A, a = A^2 mu, D = omega^2 + lambda^2, L = lambda^2)"""
    lam2 = spec.lambda_ ** 2
    return spec.amplitude, spec.coupling, spec.omega ** 2 + lam2, lam2


def alpha_coeffs(spec: ModelSpec) -> Tuple[float, float, float, float]:
    """alpha_0 .. alpha_3"""
    _, a, D, L = _parts(spec)
    alpha0 = D
    alpha1 = 3 * a / 4 - L
    alpha2 = -3 * a ** 2 / (128 * D)
    alpha3 = 3 * a ** 2 * (3 * a - 4 * L) / (512 * D ** 2)
    return alpha0, alpha1, alpha2, alpha3


def omega2_order1(spec: ModelSpec) -> FrequencyResult:
    """omega^2 + 3 A^2 mu / 4, independent of lambda"""
    return FrequencyResult.from_alphas(alpha_coeffs(spec)[:2], spec.lambda_,
                                       tag_for_lambda(spec.lambda_))


def omega2_order3(spec: ModelSpec) -> FrequencyResult:
    """Third order Omega^2 at the lambda carried by spec (plain LP when lambda = 0)"""
    return FrequencyResult.from_alphas(alpha_coeffs(spec), spec.lambda_,
                                       tag_for_lambda(spec.lambda_))


def pms_lambda(spec: ModelSpec) -> float:
    """Stationary point of the third order Omega^2 in lambda: A sqrt(3 mu) / 2"""
    if spec.mu < 0:
        raise PmsUndefinedError(f"PMS point is imaginary for mu = {spec.mu}")
    return spec.amplitude * math.sqrt(3 * spec.mu) / 2


def _pms_partials(spec: ModelSpec, omega_squared: float) -> Tuple[float, ...]:
    """Cumulative alphas at the PMS lambda with the closed expression as last entry"""
    lower = FrequencyResult.from_alphas(alpha_coeffs(spec)[:3], spec.lambda_,
                                        MethodTag.LPLDE_PMS).partials
    return lower + (omega_squared,)


def omega2_pms_derived(spec: ModelSpec) -> FrequencyResult:
    """
    Omega^2 at lambda^2 = 3 A^2 mu / 4, substituted into the third order result:

        (69 a^2 + 192 a omega^2 + 128 omega^4) / (96 a + 128 omega^2)
    """
    lambda_star = pms_lambda(spec)
    a, w2 = spec.coupling, spec.omega ** 2
    value = (69 * a ** 2 + 192 * a * w2 + 128 * w2 ** 2) / (96 * a + 128 * w2)
    at_pms = spec.with_lambda(lambda_star)
    return FrequencyResult(value, _pms_partials(at_pms, value), lambda_star, MethodTag.LPLDE_PMS)


def omega2_pms_printed(spec: ModelSpec) -> FrequencyResult:
    """
    The PMS frequency with the 64 a^2 numerator term, kept for comparison with
    omega2_pms_derived (the two differ by 5 a^2 / (96 a + 128 omega^2))
    """
    a, w2 = spec.coupling, spec.omega ** 2
    value = (64 * a ** 2 + 192 * a * w2 + 128 * w2 ** 2) / (96 * a + 128 * w2)
    lambda_star = pms_lambda(spec) if spec.mu >= 0 else 0.0
    return FrequencyResult(value, (value,), lambda_star, MethodTag.LPLDE_PMS)


def rescale(spec: ModelSpec, mu_new: float) -> ModelSpec:
    """mu -> mu_new with A -> A sqrt(mu / mu_new), keeping A^2 mu fixed"""
    if spec.mu == 0 or mu_new == 0:
        raise RescaleError("rescaling needs non-zero couplings")
    if (spec.mu > 0) != (mu_new > 0):
        raise RescaleError(f"cannot rescale mu = {spec.mu} to mu = {mu_new} of opposite sign")
    if mu_new == spec.mu:
        return spec
    return replace(spec, mu=mu_new, amplitude=spec.amplitude * math.sqrt(spec.mu / mu_new))


def solutions_order3(spec: ModelSpec) -> List[CosineSeries]:
    """x_1, x_2, x_3 in closed form"""
    A, a, D, L = _parts(spec)
    x1 = CosineSeries({
        1: -A * a / (32 * D),
        3: A * a / (32 * D),
    })
    x2 = CosineSeries({
        1: A * a * (23 * a - 32 * L) / (1024 * D ** 2),
        3: A * a * (-3 * a + 4 * L) / (128 * D ** 2),
        5: A * a ** 2 / (1024 * D ** 2),
    })
    x3 = CosineSeries({
        1: -A * a * (547 * a ** 2 - 1472 * a * L + 1024 * L ** 2) / (32768 * D ** 3),
        3: A * a * (297 * a ** 2 - 768 * a * L + 512 * L ** 2) / (16384 * D ** 3),
        5: A * a ** 2 * (-3 * a + 4 * L) / (2048 * D ** 3),
        7: A * a ** 3 / (32768 * D ** 3),
    })
    return [x1, x2, x3]


def driving_order3(spec: ModelSpec) -> List[CosineSeries]:
    """S_1, S_2, S_3 without their alpha_n A cos(tau) part"""
    A, a, D, L = _parts(spec)
    s1 = CosineSeries({
        1: A * (L - 3 * a / 4),
        3: -A * a / 4,
    })
    s2 = CosineSeries({
        1: 3 * A * a ** 2 / (128 * D),
        3: A * a * (3 * a - 4 * L) / (16 * D),
        5: -3 * A * a ** 2 / (128 * D),
    })
    s3 = CosineSeries({
        1: -3 * A * a ** 2 * (3 * a - 4 * L) / (512 * D ** 2),
        3: -A * a * (297 * a ** 2 - 768 * a * L + 512 * L ** 2) / (2048 * D ** 2),
        5: 3 * A * a ** 2 * (3 * a - 4 * L) / (256 * D ** 2),
        7: -3 * A * a ** 3 / (2048 * D ** 2),
    })
    return [s1, s2, s3]
