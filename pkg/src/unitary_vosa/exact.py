"""Exact scalars, half-integer weights and sparse vectors.

Coefficients throughout the package are either :class:`fractions.Fraction`
(the common, real case) or :class:`Gaussian` (a + bi with rational a, b).
Both support ``+ - * /`` and ``conjugate()``, which is all the engines need.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Any, Dict, Hashable, Iterable, Mapping, Union

__all__ = [
    "Gaussian",
    "Scalar",
    "Vector",
    "as_scalar",
    "conj",
    "is_zero",
    "weight",
    "is_half_integer",
    "fmt_rational",
    "parse_rational",
    "scalar_to_json",
    "scalar_from_json",
    "vec_add",
    "vec_scale",
    "vec_sub",
    "vec_combine",
]


class Gaussian:
    """Exact Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re: Any = 0, im: Any = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, Gaussian):
            return other
        if isinstance(other, (int, Rational)):
            return Gaussian(other, 0)
        if isinstance(other, complex):
            return Gaussian(Fraction(other.real), Fraction(other.imag))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Gaussian(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        num = self * o.conjugate()
        return Gaussian(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "Gaussian":
        return Gaussian(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


Scalar = Union[Fraction, Gaussian]
Vector = Dict[Hashable, Scalar]


def as_scalar(x: Any) -> Scalar:
    """Coerce ints, strings, Fractions and Gaussians into a package scalar."""
    if isinstance(x, Gaussian):
        return x if x.im != 0 else x.re
    if isinstance(x, complex):
        g = Gaussian(Fraction(x.real), Fraction(x.imag))
        return g if g.im != 0 else g.re
    if isinstance(x, Mapping):
        return scalar_from_json(x)
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def conj(x):
    return x.conjugate()


def is_zero(x) -> bool:
    return not x


def is_half_integer(x) -> bool:
    return Fraction(x).denominator in (1, 2)


def weight(value: Any) -> Fraction:
    """Validate and return a half-integer weight.

    Raises ValueError for denominators other than 1 or 2.
    """
    w = parse_rational(value) if isinstance(value, str) else Fraction(value)
    if w.denominator not in (1, 2):
        raise ValueError(f"weight {w} is not a half-integer")
    return w


def parse_rational(text: Any) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip().replace("−", "-")
    return Fraction(s)


def fmt_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def scalar_to_json(x):
    if isinstance(x, Gaussian):
        if x.im == 0:
            return fmt_rational(x.re)
        return {"re": fmt_rational(x.re), "im": fmt_rational(x.im)}
    return fmt_rational(x)


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, Mapping):
        g = Gaussian(parse_rational(obj.get("re", 0)), parse_rational(obj.get("im", 0)))
        return g if g.im != 0 else g.re
    return parse_rational(obj)


# sparse vectors: plain dicts label -> nonzero coefficient


def vec_add(into: Vector, vec: Mapping, coeff=1) -> Vector:
    """In-place ``into += coeff * vec``; drops entries that cancel."""
    if not coeff:
        return into
    for k, v in vec.items():
        x = into.get(k, 0) + coeff * v
        if x:
            into[k] = x
        elif k in into:
            del into[k]
    return into


def vec_scale(vec: Mapping, coeff) -> Vector:
    if not coeff:
        return {}
    return {k: coeff * v for k, v in vec.items()}


def vec_sub(a: Mapping, b: Mapping) -> Vector:
    out = dict(a)
    return vec_add(out, b, -1)


def vec_combine(terms: Iterable) -> Vector:
    """Sum of ``coeff * vec`` over ``(coeff, vec)`` pairs."""
    out: Vector = {}
    for c, v in terms:
        vec_add(out, v, c)
    return out
