"""Forward-mode dual numbers and the primitives features are written with

A DualScalar carries a value and the derivative along one seeded direction.
Both fields may also be numpy arrays, in which case every operation acts
elementwise; dsum reduces such a dual array to a scalar dual.

The primitives below (sin, cos, exp, power, dsum) accept plain floats and
numpy arrays too, so one feature expression serves both plain evaluation and
differentiation.
"""

import math
from typing import Union

import numpy as np

Real = Union[float, np.ndarray]


class DualScalar:
    """value + deriv·ε with ε² = 0"""

    __slots__ = ("value", "deriv")
    # Make numpy defer to our reflected operators instead of building object arrays
    __array_ufunc__ = None

    def __init__(self, value: Real, deriv: Real = 0.0):
        self.value = value
        self.deriv = deriv

    def __repr__(self):
        return f"DualScalar({self.value!r}, {self.deriv!r})"

    @staticmethod
    def _lift(other) -> "DualScalar":
        if isinstance(other, DualScalar):
            return other
        if isinstance(other, (int, float, np.ndarray, np.number)):
            return DualScalar(other, 0.0)
        raise TypeError(f"unsupported operand for DualScalar: {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        return DualScalar(self.value + other.value, self.deriv + other.deriv)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return DualScalar(self.value - other.value, self.deriv - other.deriv)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        return DualScalar(
            self.value * other.value,
            self.deriv * other.value + self.value * other.deriv,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        quotient = self.value / other.value
        return DualScalar(quotient, (self.deriv - quotient * other.deriv) / other.value)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __neg__(self):
        return DualScalar(-self.value, -self.deriv)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, np.integer)):
            raise TypeError("DualScalar supports integer powers only")
        exponent = int(exponent)
        if exponent == 0:
            return DualScalar(self.value ** 0, self.deriv * 0.0)
        return DualScalar(
            self.value ** exponent,
            exponent * self.value ** (exponent - 1) * self.deriv,
        )


def sin(x):
    if isinstance(x, DualScalar):
        return DualScalar(np.sin(x.value), x.deriv * np.cos(x.value))
    return np.sin(x)


def cos(x):
    if isinstance(x, DualScalar):
        return DualScalar(np.cos(x.value), -x.deriv * np.sin(x.value))
    return np.cos(x)


def exp(x):
    if isinstance(x, DualScalar):
        e = np.exp(x.value)
        return DualScalar(e, x.deriv * e)
    return np.exp(x)


def power(x, exponent: int):
    return x ** int(exponent)


def dsum(x):
    """Sum-reduction over the elements of a (dual) array"""
    if isinstance(x, DualScalar):
        return DualScalar(float(np.sum(x.value)), float(np.sum(x.deriv)))
    return float(np.sum(x))


def seeded(x: np.ndarray, component: int) -> DualScalar:
    """Dual array at x with derivative seed e_component"""
    seed = np.zeros_like(x, dtype=float)
    seed[component] = 1.0
    return DualScalar(np.asarray(x, dtype=float), seed)


TWO_PI = 2.0 * math.pi
