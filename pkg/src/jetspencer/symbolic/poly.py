"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a map from exponent tuples to nonzero coefficients (``int`` or
``fractions.Fraction``) over an ordered tuple of generator names.  Polynomials
over different generator tuples combine by merging the generator lists.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm
from numbers import Rational as _Rational
from operator import add as _add
from typing import Callable, Iterable, Mapping, Sequence

Scalar = (int, Fraction)


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def grlex_key(e: tuple) -> tuple:
    return (sum(e), e)


class Poly:
    __slots__ = ("gens", "terms")

    def __init__(self, gens: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.gens = tuple(gens)
        if terms is None:
            self.terms = {}
        else:
            n = len(self.gens)
            clean = {}
            for e, c in terms.items():
                if c:
                    if len(e) != n:
                        raise ValueError(f"exponent {e} does not match {n} generators")
                    clean[tuple(e)] = c
            self.terms = clean

    @classmethod
    def _raw(cls, gens: tuple, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p.gens = gens
        p.terms = terms
        return p

    @classmethod
    def const(cls, gens: Sequence[str], c) -> "Poly":
        gens = tuple(gens)
        return cls._raw(gens, {(0,) * len(gens): c} if c else {})

    @classmethod
    def var(cls, gens: Sequence[str], which) -> "Poly":
        gens = tuple(gens)
        i = gens.index(which) if isinstance(which, str) else which
        e = tuple(1 if j == i else 0 for j in range(len(gens)))
        return cls._raw(gens, {e: 1})

    @classmethod
    def gens_of(cls, gens: Sequence[str]) -> list["Poly"]:
        return [cls.var(gens, i) for i in range(len(gens))]

    # ------------------------------------------------------------------ basics
    @property
    def nvars(self) -> int:
        return len(self.gens)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def const_value(self):
        """Coefficient of the constant monomial."""
        return self.terms.get((0,) * len(self.gens), 0)

    def coeff(self, e: tuple):
        return self.terms.get(tuple(e), 0)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, which) -> int:
        i = self._index(which)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def free_gens(self) -> set:
        used = set()
        for e in self.terms:
            for i, a in enumerate(e):
                if a:
                    used.add(self.gens[i])
        return used

    def _index(self, which) -> int:
        if isinstance(which, str):
            return self.gens.index(which)
        if not 0 <= which < len(self.gens):
            raise IndexError(f"variable index {which} out of range")
        return which

    def sorted_terms(self) -> list:
        """Terms in decreasing graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def leading(self) -> tuple:
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    # --------------------------------------------------------------- coercion
    def with_gens(self, gens: Sequence[str]) -> "Poly":
        """Re-express over a generator tuple containing all used generators."""
        gens = tuple(gens)
        if gens == self.gens:
            return self
        pos = []
        for i, g in enumerate(self.gens):
            try:
                pos.append(gens.index(g))
            except ValueError:
                pos.append(None)
        n = len(gens)
        out = {}
        for e, c in self.terms.items():
            f = [0] * n
            for i, a in enumerate(e):
                if a:
                    if pos[i] is None:
                        raise ValueError(f"generator {self.gens[i]} missing from {gens}")
                    f[pos[i]] = a
            out[tuple(f)] = c
        return Poly._raw(gens, out)

    def _coerce(self, other):
        """Return (a, b) as Polys over a common generator tuple, or None."""
        if isinstance(other, Poly):
            if other.gens == self.gens:
                return self, other
            gens = self.gens + tuple(g for g in other.gens if g not in self.gens)
            return self.with_gens(gens), other.with_gens(gens)
        if isinstance(other, Scalar):
            return self, Poly.const(self.gens, other)
        return None

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other):
        if isinstance(other, Scalar):
            if not other:
                return self
            z = (0,) * len(self.gens)
            out = dict(self.terms)
            c = out.get(z, 0) + other
            if c:
                out[z] = c
            else:
                out.pop(z, None)
            return Poly._raw(self.gens, out)
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return Poly._raw(a.gens, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.gens, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (Poly,) + Scalar):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Scalar):
            return (-self) + other
        return NotImplemented

    def scale(self, c) -> "Poly":
        if not c:
            return Poly._raw(self.gens, {})
        if c == 1:
            return self
        return Poly._raw(self.gens, {e: _norm(v * c) for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return self.scale(other)
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if len(a.terms) < len(b.terms):
            a, b = b, a
        out: dict = {}
        get = out.get
        for e2, c2 in b.terms.items():
            for e1, c1 in a.terms.items():
                e = tuple(map(_add, e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return Poly._raw(a.gens, {e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            if not other:
                raise ZeroDivisionError("polynomial divided by zero")
            return self.scale(Fraction(1) / other)
        if isinstance(other, Poly):
            from .ratfunc import RatFunc
            return RatFunc(self, other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Scalar):
            from .ratfunc import RatFunc
            return RatFunc(Poly.const(self.gens, other), self)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly.const(self.gens, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if not other:
                return not self.terms
            return self.is_const() and self.const_value() == other
        if isinstance(other, Poly):
            if other.gens == self.gens:
                return self.terms == other.terms
            d = self - other
            return not d.terms
        return NotImplemented

    def __hash__(self):
        items = []
        for e, c in self.terms.items():
            items.append((tuple((self.gens[i], a) for i, a in enumerate(e) if a), c))
        return hash(frozenset(items))

    # --------------------------------------------------------------- calculus
    def diff(self, which) -> "Poly":
        """Exact partial derivative with respect to a generator (index or name)."""
        i = self._index(which)
        out = {}
        for e, c in self.terms.items():
            a = e[i]
            if a:
                out[e[:i] + (a - 1,) + e[i + 1:]] = c * a
        return Poly._raw(self.gens, out)

    def diff_multi(self, mu: Sequence[int], idx: Sequence[int] | None = None) -> "Poly":
        """Apply the derivative of multi-index mu, taken over generator positions idx."""
        idx = range(len(mu)) if idx is None else idx
        p = self
        for i, a in zip(idx, mu):
            for _ in range(a):
                p = p.diff(i)
                if not p.terms:
                    return p
        return p

    def evaluate(self, values: Mapping[str, object] | Sequence):
        """Substitute numbers (or any ring elements) for some or all generators."""
        if not isinstance(values, Mapping):
            values = dict(zip(self.gens, values))
        if all(g in values for g in self.free_gens()):
            total = 0
            pows: dict = {}
            for e, c in self.terms.items():
                t = c
                for i, a in enumerate(e):
                    if a:
                        key = (i, a)
                        if key not in pows:
                            pows[key] = values[self.gens[i]] ** a
                        t = t * pows[key]
                total = total + t
            return _norm(total) if isinstance(total, Fraction) else total
        return self.subs({k: v for k, v in values.items() if k in self.gens})

    def subs(self, mapping: Mapping[str, object]) -> "Poly":
        """Replace generators by polynomials or scalars; the rest stay symbolic."""
        keep = [g for g in self.gens if g not in mapping]
        base = tuple(keep)
        result = Poly._raw(base, {})
        cache: dict = {}
        for e, c in self.terms.items():
            mono = {}
            t = c
            for i, a in enumerate(e):
                if not a:
                    continue
                g = self.gens[i]
                if g in mapping:
                    key = (g, a)
                    if key not in cache:
                        v = mapping[g]
                        cache[key] = v ** a
                    t = t * cache[key]
                else:
                    mono[base.index(g)] = a
            m = Poly._raw(base, {tuple(mono.get(j, 0) for j in range(len(base))): 1})
            result = result + m * t
        return result

    def truncate(self, keep: Callable[[tuple], bool]) -> "Poly":
        return Poly._raw(self.gens, {e: c for e, c in self.terms.items() if keep(e)})

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.gens, {e: fn(c) for e, c in self.terms.items()})

    # ---------------------------------------------------------------- content
    def content(self) -> Fraction:
        """Positive rational gcd of the coefficients (0 for the zero polynomial)."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            c = Fraction(c)
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, "Poly"]:
        """(c, p) with self = c*p, p integral with coprime coefficients and positive leading term."""
        if not self.terms:
            return Fraction(0), self
        c = self.content()
        if self.leading()[1] < 0:
            c = -c
        return c, self.scale(1 / c)

    def divexact(self, other: "Poly") -> "Poly | None":
        """Quotient when other divides self exactly, else None."""
        if isinstance(other, Scalar):
            return self / other
        a, b = self._coerce(other)
        if not b.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if b.is_const():
            return a.scale(Fraction(1) / b.const_value())
        lb, cb = b.leading()
        rem = dict(a.terms)
        quo: dict = {}
        gens = a.gens
        while rem:
            e = max(rem, key=grlex_key)
            c = rem[e]
            d = tuple(x - y for x, y in zip(e, lb))
            if min(d) < 0:
                return None
            f = _norm(Fraction(c) / cb)
            quo[d] = f
            for eb, c2 in b.terms.items():
                k = tuple(map(_add, eb, d))
                v = rem.get(k, 0) - f * c2
                if v:
                    rem[k] = _norm(v)
                else:
                    rem.pop(k, None)
        return Poly._raw(gens, quo)

    # -------------------------------------------------------------- printing
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, gens={self.gens})"


def _fmt_coeff(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for k, (e, c) in enumerate(p.sorted_terms()):
        mono = "*".join(
            p.gens[i] if a == 1 else f"{p.gens[i]}^{a}" for i, a in enumerate(e) if a
        )
        neg = c < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{_fmt_coeff(mag)}*{mono}"
        else:
            body = _fmt_coeff(mag)
        if k == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\^)|(\*)|([+-]))")


def parse_poly(text: str, gens: Sequence[str]) -> Poly:
    """Parse the output of ``format_poly`` (sums of signed monomials) back into a Poly."""
    gens = tuple(gens)
    terms: dict = {}
    sign, coeff, expo, have = 1, Fraction(1), [0] * len(gens), False
    last = None
    caret = False
    pos = 0
    text = text.strip()

    def flush():
        e = tuple(expo)
        v = terms.get(e, 0) + sign * coeff
        if v:
            terms[e] = _norm(v)
        else:
            terms.pop(e, None)

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        pos = m.end()
        num, name, hat, star, pm = m.groups()
        if pm:
            if have:
                flush()
                sign, coeff, expo, have = 1, Fraction(1), [0] * len(gens), False
            sign = -sign if pm == "-" else sign
            last = None
        elif hat:
            if last is None:
                raise ValueError("exponent without base")
            caret = True
        elif num:
            if caret:
                expo[last] += int(num) - 1
                caret = False
            else:
                coeff *= Fraction(num)
                have = True
            last = None
        elif name:
            if name not in gens:
                raise ValueError(f"unknown generator {name!r}")
            last = gens.index(name)
            expo[last] += 1
            have = True
    if caret:
        raise ValueError("dangling exponent")
    if have:
        flush()
    return Poly(gens, terms)


def poly_diff(p: Poly, i) -> Poly:
    return p.diff(i)


def as_poly(value, gens: Sequence[str]) -> Poly:
    if isinstance(value, Poly):
        return value.with_gens(tuple(gens) + tuple(g for g in value.gens if g not in gens))
    return Poly.const(gens, value)
