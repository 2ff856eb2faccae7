"""
Truncated bivariate Taylor series ("jets").

A Jet2 of degree D at a center (x0, y0) stores the coefficients c[i, j] = f_{x^i y^j} / (i! j!)
for i + j <= D. Arithmetic truncates at D, elementary functions are composed through their
univariate Taylor series, so every derivative the rest of the package needs is exact up to
rounding.

The elementary functions accept plain floats and complex numbers as well and then simply
evaluate with numpy, which lets one catalog formula serve jets, quadrature and the integrator.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from numbers import Number
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.signal import convolve2d

from projlie.exceptions import (
    DegreeMismatch,
    DivisionByZeroJet,
    DomainError,
    MissingCoefficient,
    QuadratureNonconvergence,
    SingularPath,
)

logger = logging.getLogger(__name__)

DEFAULT_DEGREE = 6

# Absolute threshold for vanishing values, scaled by the surrounding coefficients.
ZERO_THRESHOLD = 1e-13


def _mask(degree):
    i, j = np.indices((degree + 1, degree + 1))
    return i + j <= degree


def is_negligible(value, scale=1.0):
    return abs(value) < ZERO_THRESHOLD * max(1.0, abs(scale))


class Jet2:
    """Truncated bivariate Taylor expansion of a scalar field at a point."""

    __slots__ = ("coeffs", "center", "degree")

    # Let numpy scalars hand binary operators over to Jet2.
    __array_ufunc__ = None

    def __init__(self, coeffs, center=(0.0, 0.0), degree=None):
        coeffs = np.asarray(coeffs)
        if degree is None:
            degree = coeffs.shape[0] - 1
        if coeffs.shape != (degree + 1, degree + 1):
            raise DegreeMismatch(
                f"Coefficient array of shape {coeffs.shape} does not fit degree {degree}"
            )
        dtype = complex if np.iscomplexobj(coeffs) else float
        self.coeffs = np.where(_mask(degree), coeffs, 0).astype(dtype)
        self.center = (float(center[0]), float(center[1]))
        self.degree = int(degree)

    # # # Constructors # # #

    @classmethod
    def constant(cls, value, center=(0.0, 0.0), degree=DEFAULT_DEGREE):
        dtype = complex if np.iscomplexobj(value) else float
        coeffs = np.zeros((degree + 1, degree + 1), dtype=dtype)
        coeffs[0, 0] = value
        return cls(coeffs, center, degree)

    @classmethod
    def variable(cls, center, degree=DEFAULT_DEGREE, axis=0):
        """The coordinate function x (axis 0) or y (axis 1) expanded at center."""
        coeffs = np.zeros((degree + 1, degree + 1))
        coeffs[0, 0] = center[axis]
        if degree >= 1:
            coeffs[(1, 0) if axis == 0 else (0, 1)] = 1.0
        return cls(coeffs, center, degree)

    @classmethod
    def coordinates(cls, point, degree=DEFAULT_DEGREE):
        return cls.variable(point, degree, 0), cls.variable(point, degree, 1)

    def _new(self, coeffs, degree=None):
        return Jet2(coeffs, self.center, self.degree if degree is None else degree)

    # # # Access # # #

    def __getitem__(self, index):
        i, j = index
        if i < 0 or j < 0 or i + j > self.degree:
            raise MissingCoefficient(
                f"Coefficient ({i}, {j}) is not carried by a degree-{self.degree} jet"
            )
        return self.coeffs[i, j]

    @property
    def value(self):
        return self.coeffs[0, 0]

    @property
    def scalar_kind(self):
        return "complex" if np.iscomplexobj(self.coeffs) else "real"

    def derivative(self, i, j):
        """The partial derivative d^(i+j) f / dx^i dy^j at the center."""
        return self[i, j] * math.factorial(i) * math.factorial(j)

    @property
    def gradient(self):
        return np.array([self[1, 0], self[0, 1]])

    @property
    def real(self):
        return self._new(np.real(self.coeffs))

    @property
    def imag(self):
        return self._new(np.imag(self.coeffs))

    def conjugate(self):
        return self._new(np.conj(self.coeffs))

    def to_complex(self):
        return self._new(self.coeffs.astype(complex))

    def truncate(self, degree):
        if degree > self.degree:
            raise DegreeMismatch(f"Cannot raise a degree-{self.degree} jet to degree {degree}")
        return self._new(self.coeffs[: degree + 1, : degree + 1], degree)

    def diff(self, axis):
        """Exact partial derivative; the result has degree D - 1."""
        d = self.degree
        if d == 0:
            raise MissingCoefficient("A degree-0 jet carries no derivatives")
        weights = np.arange(1, d + 1)
        if axis == 0:
            coeffs = self.coeffs[1:, :d] * weights[:, None]
        else:
            coeffs = self.coeffs[:d, 1:] * weights[None, :]
        return self._new(coeffs, d - 1)

    def magnitude(self):
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self):
        return f"Jet2(value={self.value!r}, degree={self.degree}, center={self.center})"

    # # # Arithmetic # # #

    def _check(self, other):
        if other.degree != self.degree:
            raise DegreeMismatch(f"Jet degrees differ: {self.degree} and {other.degree}")
        if other.center != self.center:
            raise DegreeMismatch(f"Jet centers differ: {self.center} and {other.center}")
        if other.scalar_kind != self.scalar_kind:
            raise DegreeMismatch(
                f"Jet scalar kinds differ: {self.scalar_kind} and {other.scalar_kind}"
            )

    def __add__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            return self._new(self.coeffs + other.coeffs)
        if isinstance(other, Number):
            coeffs = self.coeffs.astype(np.result_type(self.coeffs, other))
            coeffs[0, 0] += other
            return self._new(coeffs)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (Jet2, Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Number):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            d = self.degree
            return self._new(convolve2d(self.coeffs, other.coeffs)[: d + 1, : d + 1])
        if isinstance(other, Number):
            return self._new(self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self):
        b0 = self.value
        rest = np.abs(self.coeffs).copy()
        rest[0, 0] = 0.0
        if is_negligible(b0, rest.max()):
            raise DivisionByZeroJet(f"Division by a jet with vanishing value {b0!r}")
        n = self.degree
        series = np.array([(-1) ** k / b0 ** (k + 1) for k in range(n + 1)])
        return self._compose(series)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if isinstance(other, Number):
            if other == 0:
                raise DivisionByZeroJet("Division of a jet by zero")
            return self._new(self.coeffs / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, exponent):
        if isinstance(exponent, Number):
            return pow_const(self, exponent)
        return NotImplemented

    def __abs__(self):
        return abs_pow(self, 1)

    # # # Composition # # #

    def _compose(self, series):
        """Evaluate sum_k series[k] * (self - value)^k, exact up to degree D."""
        t = self - self.value
        result = Jet2.constant(series[self.degree], self.center, self.degree)
        if np.iscomplexobj(series) or self.scalar_kind == "complex":
            result = result.to_complex()
            t = t.to_complex()
        for k in range(self.degree - 1, -1, -1):
            result = result * t + series[k]
        return result


# # # Univariate Taylor series at a value # # #


def _factorials(n):
    return np.array([math.factorial(k) for k in range(n + 1)], dtype=float)


def _exp_series(u0, n):
    return np.exp(u0) / _factorials(n)


def _log_series(u0, n):
    k = np.arange(1, n + 1)
    return np.concatenate([[np.log(u0)], (-1.0) ** (k + 1) / (k * u0**k)])


def _sin_series(u0, n):
    return np.array([np.sin(u0 + k * np.pi / 2) for k in range(n + 1)]) / _factorials(n)


def _cos_series(u0, n):
    return np.array([np.cos(u0 + k * np.pi / 2) for k in range(n + 1)]) / _factorials(n)


def _tan_series(u0, n):
    # tan' = 1 + tan^2
    t = np.zeros(n + 1, dtype=np.result_type(u0, float))
    t[0] = np.tan(u0)
    for k in range(n):
        t[k + 1] = ((1.0 if k == 0 else 0.0) + sum(t[m] * t[k - m] for m in range(k + 1))) / (k + 1)
    return t


def _arctan_series(u0, n):
    # integrate the series of 1 / (1 + u^2) = 1 / (p0 + p1 t + t^2)
    p0, p1 = 1.0 + u0 * u0, 2.0 * u0
    q = np.zeros(n, dtype=np.result_type(u0, float))
    for k in range(n):
        acc = (1.0 if k == 0 else 0.0) - (p1 * q[k - 1] if k >= 1 else 0.0) - (q[k - 2] if k >= 2 else 0.0)
        q[k] = acc / p0
    return np.concatenate([[np.arctan(u0)], q / np.arange(1, n + 1)])


def _power_series(u0, r, n):
    coeffs = np.zeros(n + 1, dtype=np.result_type(u0, float))
    binom = 1.0
    for k in range(n + 1):
        coeffs[k] = binom * u0 ** (r - k)
        binom *= (r - k) / (k + 1)
    return coeffs


def _is_real(a):
    if isinstance(a, Jet2):
        return a.scalar_kind == "real"
    return not isinstance(a, complex) and not np.iscomplexobj(a)


# # # Elementary functions # # #


def exp(a):
    if isinstance(a, Jet2):
        return a._compose(_exp_series(a.value, a.degree))
    return np.exp(a)


def log(a):
    u0 = a.value if isinstance(a, Jet2) else a
    if _is_real(a) and u0 <= 0:
        raise DomainError(f"log of nonpositive value {u0!r}")
    if isinstance(a, Jet2):
        return a._compose(_log_series(u0, a.degree))
    return np.log(u0)


def sin(a):
    if isinstance(a, Jet2):
        return a._compose(_sin_series(a.value, a.degree))
    return np.sin(a)


def cos(a):
    if isinstance(a, Jet2):
        return a._compose(_cos_series(a.value, a.degree))
    return np.cos(a)


def tan(a):
    u0 = a.value if isinstance(a, Jet2) else a
    if abs(np.cos(u0)) < ZERO_THRESHOLD:
        raise DomainError(f"tan is singular at {u0!r}")
    if isinstance(a, Jet2):
        return a._compose(_tan_series(u0, a.degree))
    return np.tan(u0)


def arctan(a):
    u0 = a.value if isinstance(a, Jet2) else a
    if abs(1.0 + u0 * u0) < ZERO_THRESHOLD:
        raise DomainError(f"arctan is singular at {u0!r}")
    if isinstance(a, Jet2):
        return a._compose(_arctan_series(u0, a.degree))
    return np.arctan(u0)


def pow_const(a, r):
    u0 = a.value if isinstance(a, Jet2) else a
    if float(r).is_integer():
        r = int(r)
        if r < 0:
            if isinstance(a, Jet2):
                return pow_const(a.reciprocal(), -r)
            if u0 == 0:
                raise DivisionByZeroJet("Negative power of zero")
            return u0**r
        if not isinstance(a, Jet2):
            return u0**r
        result, base = Jet2.constant(1.0, a.center, a.degree), a
        if a.scalar_kind == "complex":
            result = result.to_complex()
        while r:
            if r & 1:
                result = result * base
            base = base * base
            r >>= 1
        return result
    if _is_real(a) and u0 <= 0:
        raise DomainError(f"Fractional power {r} of nonpositive value {u0!r}")
    if not _is_real(a) and u0 == 0:
        raise DomainError("Fractional power of zero")
    if isinstance(a, Jet2):
        return a._compose(_power_series(u0, r, a.degree))
    return u0**r


def sqrt(a):
    return pow_const(a, 0.5)


def abs_pow(a, r):
    """|a|^r on the sign branch fixed by the value of a."""
    if not _is_real(a):
        raise DomainError("abs_pow needs a real argument")
    u0 = a.value if isinstance(a, Jet2) else a
    if u0 == 0:
        raise DomainError("abs_pow is not differentiable at zero")
    return pow_const(a * float(np.sign(u0)), r)


def cbrt(a):
    """Real cube root, sign-preserving."""
    if not _is_real(a):
        raise DomainError("cbrt needs a real argument")
    u0 = a.value if isinstance(a, Jet2) else a
    if not isinstance(a, Jet2):
        return float(np.cbrt(u0))
    if u0 == 0:
        raise DomainError("cbrt is not differentiable at zero")
    sign = float(np.sign(u0))
    return pow_const(a * sign, 1.0 / 3.0) * sign


ELEMENTARY = {
    "exp": exp,
    "log": log,
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "arctan": arctan,
    "sqrt": sqrt,
    "abs_pow": abs_pow,
    "cbrt": cbrt,
}


def jet_elementary(fn, a, *args):
    try:
        function = ELEMENTARY[fn]
    except KeyError:
        raise ValueError(f"Unknown elementary function '{fn}'") from None
    return function(a, *args)


def jet_arith(op, a, b):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow_const":
        return pow_const(a, b)
    raise ValueError(f"Unknown jet operation '{op}'")


# # # Univariate helpers # # #


def univariate_series(fn, u0, order):
    """Taylor coefficients of fn at u0 up to the given order, via a one-variable jet."""
    coeffs = np.zeros((order + 1, order + 1), dtype=np.result_type(u0, float))
    coeffs[0, 0] = u0
    if order >= 1:
        coeffs[1, 0] = 1.0
    u = Jet2(coeffs, (np.real(u0), np.imag(u0)), order)
    result = fn(u)
    if not isinstance(result, Jet2):
        series = np.zeros(order + 1, dtype=np.result_type(result, float))
        series[0] = result
        return series
    return result.coeffs[:, 0]


def differentiate(fn, order=1):
    """Return a function computing the order-th derivative of a univariate jet function."""

    def derived(a):
        if not isinstance(a, Jet2):
            return univariate_series(fn, a, order)[order] * math.factorial(order)
        series = univariate_series(fn, a.value, a.degree + order)
        shifted = np.array(
            [series[k + order] * math.perm(k + order, order) for k in range(a.degree + 1)]
        )
        return a._compose(shifted)

    return derived


# # # Quadrature # # #


@dataclass(frozen=True)
class QuadratureJet:
    """Antiderivative y -> int_{lower_limit}^{y} integrand; only the value uses quadrature."""

    integrand: Callable
    lower_limit: float
    value_tolerance: float = 1e-12
    excluded: tuple = field(default_factory=tuple)

    def __call__(self, y):
        return jet_antiderivative(self, y)


def _quadrature_value(q, upper):
    low, high = sorted((q.lower_limit, upper))
    for point in q.excluded:
        if low <= point <= high:
            raise SingularPath(
                f"Integration path [{low}, {high}] crosses the excluded point {point}"
            )
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, abserr = quad(
                lambda s: float(np.real(q.integrand(s))),
                q.lower_limit,
                upper,
                epsabs=q.value_tolerance,
                epsrel=q.value_tolerance,
                limit=200,
            )
        except IntegrationWarning as exc:
            raise QuadratureNonconvergence(str(exc)) from exc
    logger.debug("quad [%s, %s] = %r (abserr %.2e)", q.lower_limit, upper, value, abserr)
    return value


def jet_antiderivative(q, y):
    upper = y.value if isinstance(y, Jet2) else y
    if not _is_real(y):
        raise DomainError("Antiderivatives are taken along the real line")
    value = _quadrature_value(q, float(upper))
    if not isinstance(y, Jet2):
        return value
    if y.degree == 0:
        return y._compose(np.array([value]))
    integrand = univariate_series(q.integrand, float(upper), y.degree - 1)
    series = np.concatenate([[value], integrand / np.arange(1, y.degree + 1)])
    return y._compose(series)
