"""Exact scalars: rationals via ``fractions.Fraction`` and Gaussian rationals."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[int, Fraction, str]


class ValidationError(ValueError):
    """Malformed or out-of-contract input."""


class NumericalBreakdown(ArithmeticError):
    """A float computation became too ill-conditioned to trust."""


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions, "p/q" strings and floats (exactly) to Fraction."""
    if isinstance(x, Fraction):
        if type(x.numerator) is int and type(x.denominator) is int:
            return x
        # e.g. numpy integers smuggled in; they overflow later
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, bool):
        raise ValidationError(f"not a rational: {x!r}")
    if isinstance(x, (int, Rational, str)):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational: {x!r}") from exc
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValidationError(f"non-finite value {x!r}")
        return Fraction(x)
    raise ValidationError(f"not a rational: {x!r}")


def format_fraction(q: Fraction) -> str:
    """Serialize as "p/q" with q > 0 in lowest terms."""
    return f"{q.numerator}/{q.denominator}"


class Gaussian:
    """A Gaussian rational re + i*im with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_fraction(re)
        self.im = to_fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "Gaussian":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, x) -> "Gaussian":
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls._raw(to_fraction(x), Fraction(0))

    def conj(self) -> "Gaussian":
        return Gaussian._raw(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        if isinstance(other, Gaussian):
            return Gaussian._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return Gaussian._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Gaussian):
            return Gaussian._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return Gaussian._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return Gaussian._raw(other - self.re, -self.im)
        return NotImplemented

    def __neg__(self):
        return Gaussian._raw(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, Gaussian):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return Gaussian._raw(a * c, b)
            return Gaussian._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return Gaussian._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Gaussian division by zero")
            return Gaussian._raw(self.re / other, self.im / other)
        if isinstance(other, Gaussian):
            if not other.im:
                return self / other.re
            n = other.abs2()
            if n == 0:
                raise ZeroDivisionError("Gaussian division by zero")
            return self * other.conj() / n
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Gaussian._raw(to_fraction(other), Fraction(0)) / self
        return NotImplemented

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"Gaussian({self.re})"
        return f"Gaussian({self.re}, {self.im})"


ZERO = Gaussian._raw(Fraction(0), Fraction(0))
ONE = Gaussian._raw(Fraction(1), Fraction(0))
