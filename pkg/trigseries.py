"""
Cosine Series Arithmetic
Finite sums sum_k c_k cos(k tau), closed under sums, products and second derivatives
"""

from collections import defaultdict
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import numpy as np

# Coefficients below this fraction of the largest one are dropped after every operation
PRUNE_RTOL = 1e-14

Number = Union[int, float]


def _pruned(coeffs: Mapping[int, float]) -> Dict[int, float]:
    """Drop exact zeros and round-off sized harmonics"""
    if not coeffs:
        return {}
    largest = max(abs(c) for c in coeffs.values())
    if largest == 0:
        return {}
    threshold = PRUNE_RTOL * largest
    return {k: float(c) for k, c in coeffs.items() if abs(c) >= threshold and c != 0}


class CosineSeries:
    """Immutable finite cosine series keyed by harmonic index"""

    __slots__ = ('_terms',)

    def __init__(self, coefficients: Mapping[int, Number] = None):
        """
        Args:
            coefficients: Map from harmonic index k >= 0 to coefficient; absent
                harmonics are zero
        """
        coefficients = coefficients or {}
        for k in coefficients:
            if int(k) != k or k < 0:
                raise ValueError(f"harmonic index must be a non-negative integer, got {k!r}")
        cleaned = _pruned({int(k): float(c) for k, c in coefficients.items()})
        self._terms: Tuple[Tuple[int, float], ...] = tuple(sorted(cleaned.items()))

    @classmethod
    def constant(cls, value: Number) -> 'CosineSeries':
        return cls({0: value})

    @classmethod
    def cosine(cls, k: int, amplitude: Number = 1.0) -> 'CosineSeries':
        return cls({k: amplitude})

    @property
    def coefficients(self) -> Dict[int, float]:
        return dict(self._terms)

    @property
    def harmonics(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self._terms)

    @property
    def max_harmonic(self) -> int:
        return self._terms[-1][0] if self._terms else 0

    def items(self) -> Iterable[Tuple[int, float]]:
        return iter(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def abs_sum(self) -> float:
        """Sum of absolute coefficients, an upper bound of max |series(tau)|"""
        return float(sum(abs(c) for _, c in self._terms))

    def __getitem__(self, k: int) -> float:
        for harmonic, c in self._terms:
            if harmonic == k:
                return c
        return 0.0

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CosineSeries):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __repr__(self) -> str:
        body = ', '.join(f"{k}: {c!r}" for k, c in self._terms)
        return f"CosineSeries({{{body}}})"

    def __add__(self, other: 'CosineSeries') -> 'CosineSeries':
        if isinstance(other, (int, float)):
            other = CosineSeries.constant(other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> 'CosineSeries':
        return scale(self, -1.0)

    def __sub__(self, other: 'CosineSeries') -> 'CosineSeries':
        return add(self, -other)

    def __mul__(self, other) -> 'CosineSeries':
        if isinstance(other, (int, float, np.floating)):
            return scale(self, float(other))
        return mul(self, other)

    __rmul__ = __mul__

    def __call__(self, tau):
        return evaluate(self, tau)


ZERO = CosineSeries()


def add(a: CosineSeries, b: CosineSeries) -> CosineSeries:
    """Coefficient-wise sum"""
    out: Dict[int, float] = defaultdict(float)
    for k, c in a.items():
        out[k] += c
    for k, c in b.items():
        out[k] += c
    return CosineSeries(out)


def scale(a: CosineSeries, factor: float) -> CosineSeries:
    return CosineSeries({k: factor * c for k, c in a.items()})


def mul(a: CosineSeries, b: CosineSeries) -> CosineSeries:
    """Exact product through cos(j t) cos(k t) = (cos((j+k) t) + cos(|j-k| t)) / 2"""
    out: Dict[int, float] = defaultdict(float)
    for j, cj in a.items():
        for k, ck in b.items():
            half = 0.5 * cj * ck
            out[j + k] += half
            out[abs(j - k)] += half
    return CosineSeries(out)


def second_derivative(a: CosineSeries) -> CosineSeries:
    """d^2/dtau^2 multiplies harmonic k by -k^2"""
    return CosineSeries({k: -k * k * c for k, c in a.items()})


def evaluate(a: CosineSeries, tau):
    """
    Evaluate the series at tau (scalar or array)

    Returns:
        float for scalar tau, numpy array otherwise
    """
    tau_arr = np.asarray(tau, dtype=float)
    if a.is_zero():
        values = np.zeros_like(tau_arr)
    else:
        ks = np.array([k for k, _ in a.items()], dtype=float)
        cs = np.array([c for _, c in a.items()])
        values = np.cos(np.multiply.outer(tau_arr, ks)) @ cs
    if values.ndim == 0:
        return float(values)
    return values


def poly_apply(coeffs: Sequence[float], x: CosineSeries) -> CosineSeries:
    """
    Apply the polynomial c_0 + c_1 x + c_2 x^2 + ... to a series (Horner scheme)

    Args:
        coeffs: Polynomial coefficients, lowest degree first
        x: Series to substitute
    """
    if len(coeffs) == 0:
        return ZERO
    result = CosineSeries.constant(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        result = add(mul(result, x), CosineSeries.constant(c))
    return result
