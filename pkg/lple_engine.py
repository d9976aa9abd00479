"""
Lindstedt-Poincare Recursion with Linear Delta Expansion

Solves  Omega^2 x'' + (omega^2 + lambda^2) x = delta [f(x) + lambda^2 x]
order by order in delta, with Omega^2 = sum_n alpha_n and x = sum_n x_n(tau).
Every x_n is a finite cosine series; alpha_n is fixed by removing the cos(tau)
component of the order-n driving term.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from duffing_model import FrequencyResult, MethodTag, ModelSpec, ORDER_CAP, tag_for_lambda
from errors import InvalidSpecError, OrderError, SecularCancellationError
from trigseries import CosineSeries, ZERO, add, evaluate, mul, scale, second_derivative

logger = logging.getLogger(__name__)

# cos(tau) left over after cancellation, relative to the size of the driving term
SECULAR_RTOL = 1e-10
# central-difference derivatives below this many ulps of Omega^2 per step are noise
DERIVATIVE_NOISE_FACTOR = 10

__all__ = [
    'ModelSpec', 'ExpansionState', 'PmsSearch', 'init', 'driving_term', 'cancel_secular',
    'solve_order', 'run', 'frequency_squared', 'residual', 'equation_scale',
    'nonlinear_coefficient', 'engine_omega2', 'engine_omega2_tail',
    'engine_pms_frequency',
]


@dataclass
class ExpansionState:
    """
    Accumulated frequency corrections alpha_0..alpha_N and solutions x_0..x_N.

    `powers[j][m]` caches the delta^m coefficient of (sum_n delta^n x_n)^j so
    the nonlinear term of each new order only costs the products it needs.
    """
    spec: ModelSpec
    alphas: List[float] = field(default_factory=list)
    solutions: List[CosineSeries] = field(default_factory=list)
    powers: Dict[int, List[CosineSeries]] = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        """Highest order whose solution is known"""
        return len(self.solutions) - 1

    @property
    def omega_squared(self) -> float:
        return float(sum(self.alphas))

    def solution(self) -> CosineSeries:
        """x(tau) summed at delta = 1"""
        total = ZERO
        for x_n in self.solutions:
            total = add(total, x_n)
        return total


def init(spec: ModelSpec) -> ExpansionState:
    """Zeroth order: alpha_0 = omega^2 + lambda^2, x_0 = A cos(tau)"""
    alpha0 = spec.linear_frequency_squared
    if alpha0 <= 0:
        raise InvalidSpecError("omega^2 + lambda^2 must be positive")
    return ExpansionState(spec=spec, alphas=[alpha0],
                          solutions=[CosineSeries({1: spec.amplitude})])


def _power_coefficient(state: ExpansionState, j: int, m: int) -> CosineSeries:
    """delta^m coefficient of x^j for the truncated series, cached on the state"""
    if m > state.order:
        raise OrderError(f"solution of order {m} not computed yet")
    if j == 0:
        return CosineSeries.constant(1.0) if m == 0 else ZERO
    if j == 1:
        return state.solutions[m]

    cache = state.powers.setdefault(j, [])
    while len(cache) <= m:
        k = len(cache)
        total = ZERO
        for i in range(k + 1):
            lower = _power_coefficient(state, j - 1, i)
            x_part = state.solutions[k - i]
            if lower.is_zero() or x_part.is_zero():
                continue
            total = add(total, mul(lower, x_part))
        cache.append(total)
    return cache[m]


def nonlinear_coefficient(state: ExpansionState, m: int) -> CosineSeries:
    """Coefficient of delta^m in f(sum_n delta^n x_n)"""
    total = ZERO
    for j, c in enumerate(state.spec.polynomial()):
        if c == 0:
            continue
        total = add(total, scale(_power_coefficient(state, j, m), c))
    return total


def driving_term(state: ExpansionState, n: int) -> CosineSeries:
    """
    alpha_n independent part of the order-n driving term

        S_n = -sum_{k=1}^{n-1} alpha_k x''_{n-k} + lambda^2 x_{n-1} + [f(x)]_{n-1}

    The alpha_n A cos(tau) contribution is handled by cancel_secular.
    """
    if not 1 <= n <= ORDER_CAP:
        raise OrderError(f"order must lie in [1, {ORDER_CAP}], got {n}")
    if n > len(state.solutions) or n > len(state.alphas):
        raise OrderError(f"orders 0..{n - 1} must be computed before order {n}")

    spec = state.spec
    s = ZERO
    for k in range(1, n):
        s = add(s, scale(second_derivative(state.solutions[n - k]), -state.alphas[k]))
    s = add(s, scale(state.solutions[n - 1], spec.lambda_ ** 2))
    return add(s, nonlinear_coefficient(state, n - 1))


def cancel_secular(state: ExpansionState, n: int, s: CosineSeries) -> float:
    """Fix alpha_n so the full S_n has no cos(tau) component, and record it"""
    if n != len(state.alphas):
        raise OrderError(f"next frequency correction is alpha_{len(state.alphas)}, got {n}")
    amplitude = state.spec.amplitude
    if amplitude == 0:
        raise InvalidSpecError("secular cancellation needs a non-zero amplitude")
    alpha = -s[1] / amplitude
    state.alphas.append(alpha)
    logger.debug("alpha_%d = %.17g", n, alpha)
    return alpha


def solve_order(state: ExpansionState, n: int, s_reduced: CosineSeries) -> CosineSeries:
    """
    Particular solution of alpha_0 (x_n'' + x_n) = s_reduced, plus the
    homogeneous cos(tau) part that makes x_n(0) = 0. Records x_n.
    """
    if n != len(state.solutions):
        raise OrderError(f"next solution is x_{len(state.solutions)}, got {n}")

    alpha0 = state.alphas[0]
    size = max(s_reduced.abs_sum(), abs(state.alphas[n]) * state.spec.amplitude
               if n < len(state.alphas) else 0.0)
    if abs(s_reduced[1]) > SECULAR_RTOL * size:
        raise SecularCancellationError(
            f"order {n}: cos(tau) component {s_reduced[1]!r} survived cancellation")

    # prune the particular part first so the cos(tau) term cancels exactly what is kept
    particular = CosineSeries({k: s_k / (alpha0 * (1 - k * k))
                               for k, s_k in s_reduced.items() if k != 1})
    coeffs = particular.coefficients
    coeffs[1] = -math.fsum(coeffs.values())
    x_n = CosineSeries(coeffs)
    state.solutions.append(x_n)
    return x_n


def run(spec: ModelSpec) -> ExpansionState:
    """Full recursion through order spec.order"""
    state = init(spec)
    amplitude = spec.amplitude
    for n in range(1, spec.order + 1):
        s = driving_term(state, n)
        alpha = cancel_secular(state, n, s)
        s_reduced = add(s, CosineSeries({1: alpha * amplitude}))
        solve_order(state, n, s_reduced)
    return state


def frequency_squared(state: ExpansionState,
                      method_tag: Optional[MethodTag] = None) -> FrequencyResult:
    """Omega^2 = sum of the alphas, with cumulative partial sums per order"""
    lambda_used = state.spec.lambda_
    result = FrequencyResult.from_alphas(state.alphas, lambda_used,
                                         method_tag or tag_for_lambda(lambda_used))
    if result.is_negative:
        logger.warning("Omega^2 = %g <= 0 for %s: outside the validity of the expansion",
                       result.omega_squared, state.spec)
    return result


def _truncated_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Product of two delta series of pointwise values, truncated to len(p) orders"""
    out = np.zeros_like(p)
    for k in range(len(p)):
        for i in range(k + 1):
            out[k] += p[i] * q[k - i]
    return out


def residual(state: ExpansionState, tau_samples: Sequence[float]) -> float:
    """
    Largest order-by-order residual of the interpolated Duffing equation.

    Works on pointwise values at tau_samples (the nonlinear term is rebuilt
    numerically, not with series products) so it checks the series algebra too.
    """
    tau = np.asarray(tau_samples, dtype=float)
    N = state.order
    alphas = state.alphas[:N + 1]
    lam2 = state.spec.lambda_ ** 2

    x = np.array([evaluate(x_n, tau) for x_n in state.solutions]).reshape(N + 1, tau.size)
    xpp = np.array([evaluate(second_derivative(x_n), tau)
                    for x_n in state.solutions]).reshape(N + 1, tau.size)

    f_series = np.zeros_like(x)
    coeffs = state.spec.polynomial()
    f_series[0] = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        f_series = _truncated_product(f_series, x)
        f_series[0] += c

    worst = 0.0
    for n in range(N + 1):
        lhs = sum(alphas[k] * xpp[n - k] for k in range(n + 1)) + alphas[0] * x[n]
        rhs = f_series[n - 1] + lam2 * x[n - 1] if n >= 1 else 0.0
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def equation_scale(state: ExpansionState) -> float:
    """Largest absolute harmonic content of any single term of any order equation"""
    lam2 = state.spec.lambda_ ** 2
    alphas = state.alphas
    biggest = 0.0
    for n in range(state.order + 1):
        terms = [abs(alphas[k]) * second_derivative(state.solutions[n - k]).abs_sum()
                 for k in range(n + 1)]
        terms.append(abs(alphas[0]) * state.solutions[n].abs_sum())
        if n >= 1:
            terms.append(lam2 * state.solutions[n - 1].abs_sum())
            terms.append(nonlinear_coefficient(state, n - 1).abs_sum())
        biggest = max(biggest, max(terms))
    return biggest


def engine_omega2(spec: ModelSpec, lambda_: float) -> float:
    """Omega^2 through spec.order at the given lambda"""
    return run(spec.with_lambda(abs(lambda_))).omega_squared


def engine_omega2_tail(spec: ModelSpec, lambda_: float) -> float:
    """
    alpha_2 + ... + alpha_N at the given lambda.

    alpha_0 + alpha_1 = omega^2 - [f(x_0)]_1 / A does not depend on lambda, so
    this tail has the same stationary points as Omega^2 without the round-off
    of the O(1) terms that swamps dOmega^2/dlambda at weak coupling.
    """
    return math.fsum(run(spec.with_lambda(abs(lambda_))).alphas[2:])


class PmsSearch:
    """Principle of Minimal Sensitivity search for the LDE parameter lambda"""

    def __init__(self, omega2_fn: Callable[[float], float], lambda_max: float,
                 num_points: int = 48, xtol: float = 1e-12):
        """
        Initialize PMS search

        Args:
            omega2_fn: Omega^2 as a function of lambda (even in lambda)
            lambda_max: Upper end of the bracketing scan, which starts at 0
            num_points: Number of scan points
            xtol: Bisection tolerance on lambda
        """
        self.omega2_fn = omega2_fn
        self.lambda_max = lambda_max
        self.num_points = num_points
        self.xtol = xtol

    def _value(self, lambda_: float) -> float:
        return self.omega2_fn(abs(lambda_))

    def derivative(self, lambda_: float) -> float:
        """Central difference of Omega^2 in lambda, step 1e-5 (1 + lambda)"""
        h = 1e-5 * (1 + lambda_)
        return (self._value(lambda_ + h) - self._value(lambda_ - h)) / (2 * h)

    def curvature(self, lambda_: float) -> float:
        h = 1e-3 * (1 + lambda_)
        return (self._value(lambda_ + h) - 2 * self._value(lambda_)
                + self._value(lambda_ - h)) / (h * h)

    def optimize(self) -> Tuple[float, float, Dict]:
        """
        Run the scan and refine every derivative sign change by bisection

        Returns:
            Tuple of (best_lambda, omega2_at_best, history); best is the
            flattest stationary point, or lambda = 0 when there is none
        """
        # lambda = 0 is always stationary by symmetry, start just above it;
        # geometric spacing resolves stationary points far below lambda_max
        start = self.lambda_max * 1e-4
        grid = np.geomspace(start, self.lambda_max, self.num_points)
        derivatives = [self.derivative(lam) for lam in grid]

        history = {
            'lambda_grid': grid.tolist(),
            'derivative': derivatives,
            'stationary_points': [],
            'fallback': False,
        }

        # round-off of the central difference, whose step is never below 1e-5
        size = max(abs(self._value(0.0)), abs(self._value(self.lambda_max)))
        floor = DERIVATIVE_NOISE_FACTOR * np.finfo(float).eps * size / 1e-5

        for i in range(len(grid) - 1):
            if max(abs(derivatives[i]), abs(derivatives[i + 1])) <= floor:
                continue
            if derivatives[i] * derivatives[i + 1] < 0:
                root = bisect(self.derivative, grid[i], grid[i + 1], xtol=self.xtol)
                history['stationary_points'].append((root, self.curvature(root)))

        logger.debug("PMS scan on [0, %g]: stationary points %s",
                     self.lambda_max, history['stationary_points'])

        if not history['stationary_points']:
            history['fallback'] = True
            return 0.0, self._value(0.0), history

        best_lambda, _ = min(history['stationary_points'], key=lambda p: abs(p[1]))
        return best_lambda, self._value(best_lambda), history


def pms_scan_limit(spec: ModelSpec) -> float:
    """Upper end of the lambda scan, 4 A sqrt(max(mu, 0)) + omega"""
    return 4 * spec.amplitude * math.sqrt(max(spec.mu, 0.0)) + spec.omega


def engine_pms_frequency(spec: ModelSpec, num_points: int = 48) -> FrequencyResult:
    """
    Engine frequency at the PMS lambda found numerically at order spec.order.
    Falls back to plain LP (lambda = 0, tag LP) when no stationary point exists.
    """
    if spec.mu < 0:
        logger.debug("mu = %g < 0: no real PMS point, using lambda = 0", spec.mu)
        return frequency_squared(run(spec.with_lambda(0.0)), MethodTag.LP)
    if not any(spec.polynomial()):
        return frequency_squared(run(spec.with_lambda(0.0)), MethodTag.LP)

    search = PmsSearch(lambda lam: engine_omega2_tail(spec, lam), pms_scan_limit(spec),
                       num_points=num_points)
    best_lambda, _, history = search.optimize()
    if history['fallback']:
        return frequency_squared(run(spec.with_lambda(0.0)), MethodTag.LP)
    return frequency_squared(run(spec.with_lambda(best_lambda)), MethodTag.LPLDE_PMS)
