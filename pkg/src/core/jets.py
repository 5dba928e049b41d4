"""
Truncated Taylor ("jet") arithmetic.

A Jet holds the normalised Taylor coefficients c_j = f^(j)(t0) / j! of a real
function around a base point t0.  Composite expressions built from scale
factors are evaluated coefficient-wise, so derivatives of every intermediate
quantity are exact up to rounding, with no finite differencing.

Binary operations truncate to the shorter operand.  Jets are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from src.core.errors import (
    BasePointMismatch,
    DivisionByZeroJet,
    NonPositiveLeadingCoefficient,
    OrderExhausted,
)

Scalar = Union[int, float]


@dataclass(frozen=True, eq=False)
class Jet:
    """Truncated Taylor expansion of a real function at ``base_point``."""

    base_point: float
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if coeffs.size == 0:
            raise ValueError("A jet needs at least the value coefficient.")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError(f"Jet coefficients must be finite, got {coeffs!r}.")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "base_point", float(self.base_point))

    # construction

    @classmethod
    def constant(cls, value: Scalar, order: int, base_point: float = 0.0) -> "Jet":
        coeffs = np.zeros(order + 1)
        coeffs[0] = value
        return cls(base_point, coeffs)

    @classmethod
    def zero(cls, order: int, base_point: float = 0.0) -> "Jet":
        return cls.constant(0.0, order, base_point)

    @classmethod
    def variable(cls, base_point: float, order: int, scale: float = 1.0,
                 shift: float = 0.0) -> "Jet":
        """Jet of the affine map t -> scale * t + shift at ``base_point``."""
        coeffs = np.zeros(order + 1)
        coeffs[0] = scale * base_point + shift
        if order >= 1:
            coeffs[1] = scale
        return cls(base_point, coeffs)

    @classmethod
    def from_derivatives(cls, base_point: float, derivatives: Sequence[float]) -> "Jet":
        """Build a jet from plain derivatives f, f', f'', ..."""
        derivs = np.asarray(derivatives, dtype=float)
        factorials = np.array([math.factorial(j) for j in range(derivs.size)], dtype=float)
        return cls(base_point, derivs / factorials)

    # accessors

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def derivative(self, j: int) -> float:
        """The j-th derivative f^(j)(t0)."""
        if j < 0 or j > self.order:
            raise OrderExhausted(f"Derivative {j} requested from a jet of order {self.order}.")
        return float(math.factorial(j) * self.coeffs[j])

    def derivatives(self) -> np.ndarray:
        factorials = np.array([math.factorial(j) for j in range(self.order + 1)], dtype=float)
        return self.coeffs * factorials

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderExhausted(f"Cannot extend a jet of order {self.order} to {order}.")
        return Jet(self.base_point, self.coeffs[: order + 1])

    def evaluate(self, dt: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Evaluate the Taylor polynomial at base_point + dt."""
        return np.polyval(self.coeffs[::-1], dt)

    def __repr__(self) -> str:
        return f"Jet(t0={self.base_point!r}, coeffs={self.coeffs.tolist()!r})"

    # operators

    def _coerce(self, other: Union["Jet", Scalar]) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(float(other), self.order, self.base_point)

    def __neg__(self) -> "Jet":
        return Jet(self.base_point, -self.coeffs)

    def __add__(self, other):
        return add(self, self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, self._coerce(other))

    def __rsub__(self, other):
        return sub(self._coerce(other), self)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return mul(self, other)
        return scale(self, float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return div(self, other)
        if other == 0:
            raise DivisionByZeroJet("Division of a jet by the scalar 0.")
        return scale(self, 1.0 / float(other))

    def __rtruediv__(self, other):
        return div(self._coerce(other), self)

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            return powi(self, int(p))
        return powf(self, float(p))


def _check_pair(x: Jet, y: Jet, order: Optional[int]) -> int:
    if x.base_point != y.base_point:
        raise BasePointMismatch(
            f"Jets expanded at t0={x.base_point} and t0={y.base_point} cannot be combined."
        )
    return min(x.order, y.order) if order is None else order


def _padded(x: Jet, order: int) -> np.ndarray:
    out = np.zeros(order + 1)
    n = min(order, x.order) + 1
    out[:n] = x.coeffs[:n]
    return out


def add(x: Jet, y: Jet) -> Jet:
    order = _check_pair(x, y, None)
    return Jet(x.base_point, x.coeffs[: order + 1] + y.coeffs[: order + 1])


def sub(x: Jet, y: Jet) -> Jet:
    order = _check_pair(x, y, None)
    return Jet(x.base_point, x.coeffs[: order + 1] - y.coeffs[: order + 1])


def scale(x: Jet, factor: float) -> Jet:
    return Jet(x.base_point, factor * x.coeffs)


def mul(x: Jet, y: Jet, order: Optional[int] = None) -> Jet:
    """Cauchy product truncated at ``order``.

    With an explicit ``order`` above the operands' orders, the operands are
    treated as exact polynomials (zero-padded).
    """
    order = _check_pair(x, y, order)
    product = np.convolve(_padded(x, order), _padded(y, order))[: order + 1]
    return Jet(x.base_point, product)


def div(x: Jet, y: Jet) -> Jet:
    order = _check_pair(x, y, None)
    if y.coeffs[0] == 0.0:
        raise DivisionByZeroJet(
            f"Divisor jet vanishes at t0={y.base_point}; a(t) or Omega is zero there."
        )
    xs, ys = x.coeffs, y.coeffs
    q = np.zeros(order + 1)
    for k in range(order + 1):
        q[k] = (xs[k] - np.dot(ys[1 : k + 1], q[k - 1 :: -1][:k])) / ys[0]
    return Jet(x.base_point, q)


def sqrt(x: Jet) -> Jet:
    if x.coeffs[0] <= 0.0:
        raise NonPositiveLeadingCoefficient(f"sqrt of a jet with value {x.coeffs[0]!r}.")
    xs = x.coeffs
    s = np.zeros(x.order + 1)
    s[0] = math.sqrt(xs[0])
    for k in range(1, x.order + 1):
        s[k] = (xs[k] - np.dot(s[1:k], s[k - 1 : 0 : -1])) / (2.0 * s[0])
    return Jet(x.base_point, s)


def exp(x: Jet) -> Jet:
    xs = x.coeffs
    e = np.zeros(x.order + 1)
    e[0] = math.exp(xs[0])
    for k in range(1, x.order + 1):
        j = np.arange(1, k + 1)
        e[k] = np.dot(j * xs[1 : k + 1], e[k - 1 :: -1][:k]) / k
    return Jet(x.base_point, e)


def log(x: Jet) -> Jet:
    if x.coeffs[0] <= 0.0:
        raise NonPositiveLeadingCoefficient(f"log of a jet with value {x.coeffs[0]!r}.")
    xs = x.coeffs
    lg = np.zeros(x.order + 1)
    lg[0] = math.log(xs[0])
    for k in range(1, x.order + 1):
        j = np.arange(1, k)
        lg[k] = (xs[k] - np.dot(j * lg[1:k], xs[k - 1 : 0 : -1]) / k) / xs[0]
    return Jet(x.base_point, lg)


def powf(x: Jet, p: float) -> Jet:
    """x**p for real p; requires a positive value."""
    if x.coeffs[0] <= 0.0:
        raise NonPositiveLeadingCoefficient(
            f"Real power {p} of a jet with value {x.coeffs[0]!r}."
        )
    xs = x.coeffs
    out = np.zeros(x.order + 1)
    out[0] = xs[0] ** p
    for k in range(1, x.order + 1):
        j = np.arange(1, k + 1)
        weights = (p + 1.0) * j - k
        out[k] = np.dot(weights * xs[1 : k + 1], out[k - 1 :: -1][:k]) / (k * xs[0])
    return Jet(x.base_point, out)


def powi(x: Jet, p: int) -> Jet:
    """x**p for integer p by repeated squaring; negative p divides."""
    if p < 0:
        return div(Jet.constant(1.0, x.order, x.base_point), powi(x, -p))
    result = Jet.constant(1.0, x.order, x.base_point)
    base = x
    while p:
        if p & 1:
            result = mul(result, base)
        p >>= 1
        if p:
            base = mul(base, base)
    return result


def tanh(x: Jet) -> Jet:
    # exponent kept non-positive so that large |t| never overflows
    sign = 1.0 if x.coeffs[0] >= 0.0 else -1.0
    e = exp(scale(x, -2.0 * sign))
    one = Jet.constant(1.0, x.order, x.base_point)
    return scale(div(sub(one, e), add(one, e)), sign)


def derivative_jet(x: Jet) -> Jet:
    """Jet of f' from the jet of f; the order drops by one."""
    if x.order < 1:
        raise OrderExhausted(f"Cannot differentiate a jet of order 0 at t0={x.base_point}.")
    j = np.arange(1, x.order + 1)
    return Jet(x.base_point, j * x.coeffs[1:])

