"""
Duffing Problem Model
Value types shared by the expansion engine, the closed forms and the sweeps
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import InvalidSpecError

# Beyond this order double precision cancellation in the high harmonics is untrusted
ORDER_CAP = 16


class MethodTag(str, Enum):
    """How a frequency was obtained"""
    LP = 'LP'
    LPLDE_PMS = 'LPLDE_PMS'
    LPLDE_FIXED_LAMBDA = 'LPLDE_FIXED_LAMBDA'


@dataclass(frozen=True)
class ModelSpec:
    """
    One Duffing problem instance, x'' + omega^2 x = -mu x^3 with x(0) = A, x'(0) = 0,
    together with the LDE parameter lambda and the expansion order.

    Args:
        omega: Linear frequency (> 0)
        mu: Cubic coupling (either sign)
        amplitude: Oscillation amplitude A (> 0)
        lambda_: LDE interpolation frequency (>= 0)
        order: Expansion order N, 0 <= N <= ORDER_CAP
        nonlinearity: Optional polynomial coefficients c_0..c_d of f(x) in
            x'' + omega^2 x = f(x); None means the Duffing term -mu x^3
    """
    omega: float
    mu: float
    amplitude: float
    lambda_: float = 0.0
    order: int = 3
    nonlinearity: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        for name in ('omega', 'mu', 'amplitude', 'lambda_'):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidSpecError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidSpecError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

        if self.omega <= 0:
            raise InvalidSpecError(f"omega must be positive, got {self.omega}")
        if self.amplitude <= 0:
            raise InvalidSpecError(f"amplitude must be positive, got {self.amplitude}")
        if self.lambda_ < 0:
            raise InvalidSpecError(f"lambda must be non-negative, got {self.lambda_}")
        if self.linear_frequency_squared <= 0:
            raise InvalidSpecError("omega^2 + lambda^2 must be positive")

        if isinstance(self.order, bool) or int(self.order) != self.order:
            raise InvalidSpecError(f"order must be an integer, got {self.order!r}")
        object.__setattr__(self, 'order', int(self.order))
        if not 0 <= self.order <= ORDER_CAP:
            raise InvalidSpecError(f"order must lie in [0, {ORDER_CAP}], got {self.order}")

        if self.nonlinearity is not None:
            coeffs = tuple(float(c) for c in self.nonlinearity)
            if not coeffs or not all(math.isfinite(c) for c in coeffs):
                raise InvalidSpecError("nonlinearity needs at least one finite coefficient")
            object.__setattr__(self, 'nonlinearity', coeffs)

    @property
    def linear_frequency_squared(self) -> float:
        """omega^2 + lambda^2, the frequency of the solvable interpolating problem"""
        return self.omega ** 2 + self.lambda_ ** 2

    @property
    def coupling(self) -> float:
        """A^2 mu, the only combination of A and mu the Duffing frequency depends on"""
        return self.amplitude ** 2 * self.mu

    @property
    def is_bounded(self) -> bool:
        return self.omega ** 2 + self.mu * self.amplitude ** 2 > 0

    def polynomial(self) -> Tuple[float, ...]:
        """Coefficients of f(x), lowest degree first"""
        if self.nonlinearity is not None:
            return self.nonlinearity
        return (0.0, 0.0, 0.0, -self.mu)

    def with_lambda(self, lambda_: float) -> 'ModelSpec':
        return replace(self, lambda_=lambda_)

    def with_order(self, order: int) -> 'ModelSpec':
        return replace(self, order=order)


@dataclass(frozen=True)
class FrequencyResult:
    """
    Squared frequency with its cumulative per-order partial sums.

    The last partial is always the reported omega_squared.
    """
    omega_squared: float
    partials: Tuple[float, ...]
    lambda_used: float
    method_tag: MethodTag

    @classmethod
    def from_alphas(cls, alphas: Sequence[float], lambda_used: float,
                    method_tag: MethodTag) -> 'FrequencyResult':
        partials = tuple(float(p) for p in np.cumsum(alphas))
        return cls(partials[-1], partials, float(lambda_used), method_tag)

    @property
    def is_negative(self) -> bool:
        """Omega^2 <= 0 signals parameters outside the validity of the expansion"""
        return not self.omega_squared > 0

    @property
    def omega(self) -> float:
        return math.sqrt(self.omega_squared) if not self.is_negative else math.nan

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega if not self.is_negative else math.nan


def tag_for_lambda(lambda_: float) -> MethodTag:
    """LP when no interpolation is used, fixed-lambda LPLDE otherwise"""
    return MethodTag.LP if lambda_ == 0 else MethodTag.LPLDE_FIXED_LAMBDA
