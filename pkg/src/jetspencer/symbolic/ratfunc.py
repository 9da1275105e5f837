"""Quotients of polynomials, normalized without multivariate gcd.

Normalization divides out the denominator whenever it divides the numerator
exactly and makes the denominator primitive with a positive leading coefficient.
Equality is decided by cross multiplication, so two unreduced representations
of the same fraction still compare equal.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .poly import Poly, Scalar, format_poly, parse_poly


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num, den=1, gens: Sequence[str] = ()):
        if not isinstance(num, Poly):
            if isinstance(den, Poly):
                num = Poly.const(den.gens, num)
            else:
                num = Poly.const(gens, num)
        if not isinstance(den, Poly):
            den = Poly.const(num.gens, den)
        num, den = num._coerce(den)
        if not den.terms:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num.terms:
            self.num, self.den = num, Poly.const(num.gens, 1)
            return
        if den.is_const():
            self.num, self.den = num.scale(Fraction(1) / den.const_value()), Poly.const(num.gens, 1)
            return
        q = num.divexact(den)
        if q is not None:
            self.num, self.den = q, Poly.const(num.gens, 1)
            return
        c, d = den.primitive()
        self.num, self.den = num.scale(Fraction(1) / c), d

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFunc":
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @property
    def gens(self) -> tuple:
        return self.num.gens

    def is_poly(self) -> bool:
        return self.den.is_const()

    def as_poly(self) -> Poly:
        if not self.is_poly():
            raise ValueError(f"{self} is not a polynomial")
        return self.num.scale(Fraction(1) / self.den.const_value())

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self) -> bool:
        return bool(self.num.terms)

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self):
        return Fraction(self.num.const_value()) / self.den.const_value()

    # ------------------------------------------------------------- arithmetic
    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc._raw(other, Poly.const(other.gens, 1))
        if isinstance(other, Scalar):
            return RatFunc._raw(Poly.const(self.gens, other), Poly.const(self.gens, 1))
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if o.den.is_const():
            return RatFunc(self.num + o.num * self.den * (Fraction(1) / o.den.const_value()), self.den)
        if self.den.is_const():
            return RatFunc(self.num * o.den * (Fraction(1) / self.den.const_value()) + o.num, o.den)
        q = o.den.divexact(self.den)
        if q is not None:
            return RatFunc(self.num * q + o.num, o.den)
        q = self.den.divexact(o.den)
        if q is not None:
            return RatFunc(self.num + o.num * q, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not self.num.terms or not o.num.terms:
            return RatFunc(Poly.const(self.gens, 0))
        num_a, den_b = self.num, o.den
        num_b, den_a = o.num, self.den
        if not den_b.is_const():
            q = num_a.divexact(den_b)
            if q is not None:
                num_a, den_b = q, Poly.const(q.gens, 1)
        if not den_a.is_const():
            q = num_b.divexact(den_a)
            if q is not None:
                num_b, den_a = q, Poly.const(q.gens, 1)
        return RatFunc(num_a * num_b, den_a * den_b)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num.terms:
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    __hash__ = None

    # --------------------------------------------------------------- calculus
    def diff(self, which) -> "RatFunc":
        if self.den.is_const():
            return RatFunc._raw(self.num.diff(which), self.den)
        n, d = self.num, self.den
        return RatFunc(n.diff(which) * d - n * d.diff(which), d * d)

    def evaluate(self, values: Mapping[str, object] | Sequence):
        d = self.den.evaluate(values)
        n = self.num.evaluate(values)
        if isinstance(d, Poly) or isinstance(n, Poly):
            return RatFunc(n, d)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return Fraction(n) / d

    def subs(self, mapping: Mapping[str, object]) -> "RatFunc":
        return to_ratfunc(self.num.subs(mapping)) / to_ratfunc(self.den.subs(mapping))

    def with_gens(self, gens: Sequence[str]) -> "RatFunc":
        return RatFunc._raw(self.num.with_gens(gens), self.den.with_gens(gens))

    def __str__(self) -> str:
        return format_ratfunc(self)

    def __repr__(self) -> str:
        return f"RatFunc({format_ratfunc(self)!r})"


def format_ratfunc(r: RatFunc) -> str:
    if r.den == 1:
        return format_poly(r.num)
    return f"({format_poly(r.num)})/({format_poly(r.den)})"


def parse_ratfunc(text: str, gens: Sequence[str]) -> RatFunc:
    text = text.strip()
    if text.startswith("(") and ")/(" in text and text.endswith(")"):
        a, b = text[1:-1].split(")/(", 1)
        return RatFunc(parse_poly(a, gens), parse_poly(b, gens))
    return RatFunc(parse_poly(text, gens))


def to_ratfunc(value, gens: Sequence[str] = ()) -> RatFunc:
    if isinstance(value, RatFunc):
        return value
    if isinstance(value, Poly):
        return RatFunc._raw(value, Poly.const(value.gens, 1))
    return RatFunc._raw(Poly.const(gens, value), Poly.const(gens, 1))
