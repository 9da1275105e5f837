"""Truncated multivariate power series with symbolic coefficients.

A ``SeriesRing`` splits its generators into groups of infinitesimal variables,
each group truncated at its own total degree, and free symbols that are never
truncated.  Elements are ``numerator / denominator`` where the denominator is
a polynomial in the free symbols only, so inversion of a series with a
nonzero constant part only ever divides by that constant part.

Typical uses: Taylor data of functions about a point (displacements ``s``),
fibre variables of jets, and a nilpotent parameter ``t`` with ``t**2 = 0``.
"""
from __future__ import annotations

from fractions import Fraction
from operator import add as _add
from typing import Mapping, Sequence

from .poly import Poly, Scalar, _norm
from .ratfunc import RatFunc


class SeriesRing:
    def __init__(self, groups: Sequence[tuple[Sequence[str], int]], symbols: Sequence[str] = ()):
        gens: list[str] = []
        idx = []
        maxdeg = []
        for names, d in groups:
            idx.append(tuple(range(len(gens), len(gens) + len(names))))
            gens.extend(names)
            maxdeg.append(d)
        self.inf_count = len(gens)
        gens.extend(symbols)
        self.gens = tuple(gens)
        self.groups = tuple(idx)
        self.maxdeg = tuple(maxdeg)
        self.symbols = tuple(symbols)
        self._group_of = {}
        for g, ids in enumerate(idx):
            for i in ids:
                self._group_of[i] = g
        self._one = Poly.const(self.gens, 1)

    def group_degrees(self, e: tuple) -> tuple:
        return tuple(sum(e[i] for i in ids) for ids in self.groups)

    def keep(self, e: tuple, prec: tuple) -> bool:
        for ids, p in zip(self.groups, prec):
            s = 0
            for i in ids:
                s += e[i]
            if s > p:
                return False
        return True

    def zero(self) -> "Series":
        return Series(self, Poly(self.gens), self._one, self.maxdeg)

    def one(self) -> "Series":
        return self.const(1)

    def const(self, c) -> "Series":
        if isinstance(c, RatFunc):
            return Series(self, c.num.with_gens(self.gens), c.den.with_gens(self.gens), self.maxdeg)
        if isinstance(c, Poly):
            return self.from_poly(c)
        return Series(self, Poly.const(self.gens, c), self._one, self.maxdeg)

    def var(self, name: str) -> "Series":
        return Series(self, Poly.var(self.gens, name), self._one, self.maxdeg)

    def from_poly(self, p: Poly) -> "Series":
        p = p.with_gens(self.gens)
        return Series(self, p.truncate(lambda e: self.keep(e, self.maxdeg)), self._one, self.maxdeg)

    def index(self, name: str) -> int:
        return self.gens.index(name)


class Series:
    __slots__ = ("ring", "num", "den", "prec")

    def __init__(self, ring: SeriesRing, num: Poly, den: Poly, prec: tuple):
        self.ring = ring
        self.num = num
        self.den = den
        self.prec = prec
        if den.is_const() and den.const_value() != 1:
            self.num = num.scale(Fraction(1) / den.const_value())
            self.den = ring._one

    # -------------------------------------------------------------- helpers
    def _wrap(self, other) -> "Series | None":
        if isinstance(other, Series):
            return other
        if isinstance(other, Scalar):
            return self.ring.const(other)
        if isinstance(other, (Poly, RatFunc)):
            return self.ring.const(other)
        return None

    def _cut(self, num: Poly, prec: tuple) -> Poly:
        ring = self.ring
        return Poly._raw(num.gens, {e: c for e, c in num.terms.items() if ring.keep(e, prec)})

    def is_zero(self) -> bool:
        return not self.num.terms

    def __bool__(self) -> bool:
        return bool(self.num.terms)

    # ----------------------------------------------------------- arithmetic
    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        prec = tuple(map(min, self.prec, o.prec))
        if self.den == o.den:
            num, den = self.num + o.num, self.den
        else:
            q = o.den.divexact(self.den)
            if q is not None:
                num, den = self.num * q + o.num, o.den
            else:
                q = self.den.divexact(o.den)
                if q is not None:
                    num, den = self.num + o.num * q, self.den
                else:
                    num, den = self.num * o.den + o.num * self.den, self.den * o.den
        if prec != self.prec or prec != o.prec:
            num = self._cut(num, prec)
        return Series(self.ring, num, den, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.ring, -self.num, self.den, self.prec)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return Series(self.ring, self.num.scale(other), self.den, self.prec)
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        prec = tuple(map(min, self.prec, o.prec))
        num = _trunc_mul(self.ring, self.num, o.num, prec)
        return Series(self.ring, num, self.den * o.den if not o.den.is_const() else self.den, prec)

    __rmul__ = __mul__

    def constant_part(self) -> "Series":
        """Part of degree zero in every infinitesimal group."""
        k = self.ring.inf_count
        num = Poly._raw(self.num.gens, {e: c for e, c in self.num.terms.items() if not any(e[:k])})
        return Series(self.ring, num, self.den, self.prec)

    def inverse(self) -> "Series":
        ring = self.ring
        c0 = self.constant_part().num
        if not c0.terms:
            raise ZeroDivisionError("series with vanishing constant part is not invertible")
        nil = self.num - c0
        # 1/(c0 + nil) = sum_j (-nil)^j / c0^(j+1), nilpotent after truncation
        powers = [Poly.const(ring.gens, 1)]
        while True:
            nxt = _trunc_mul(ring, powers[-1], -nil, self.prec)
            if not nxt.terms:
                break
            powers.append(nxt)
        J = len(powers)
        if c0.is_const():
            c = Fraction(1) / c0.const_value()
            num = Poly(ring.gens)
            f = c
            for p in powers:
                num = num + p.scale(f)
                f = f * c
            return Series(ring, _trunc_mul(ring, num, self.den, self.prec), ring._one, self.prec)
        num = Poly(ring.gens)
        c0pows = [Poly.const(ring.gens, 1)]
        for _ in range(J):
            c0pows.append(c0pows[-1] * c0)
        for j, p in enumerate(powers):
            num = num + p * c0pows[J - 1 - j]
        num = _trunc_mul(ring, num, self.den, self.prec)
        return Series(ring, num, c0pows[J], self.prec)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return self * (Fraction(1) / other)
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    # ------------------------------------------------------------- calculus
    def diff(self, name: str) -> "Series":
        ring = self.ring
        i = ring.index(name)
        g = ring._group_of.get(i)
        if g is None:
            raise ValueError(f"{name} is a free symbol; differentiate series only in infinitesimals")
        prec = self.prec[:g] + (self.prec[g] - 1,) + self.prec[g + 1:]
        if prec[g] < 0:
            return Series(ring, Poly(ring.gens), ring._one, prec)
        return Series(ring, self.num.diff(i), self.den, prec)

    def coefficient(self, names: Sequence[str], mu: Sequence[int]) -> "Series":
        """Coefficient of prod(names**mu), keeping the other variables."""
        ring = self.ring
        ids = [ring.index(v) for v in names]
        out = {}
        for e, c in self.num.terms.items():
            if all(e[i] == a for i, a in zip(ids, mu)):
                f = list(e)
                for i in ids:
                    f[i] = 0
                out[tuple(f)] = c
        return Series(ring, Poly._raw(ring.gens, out), self.den, self.prec)

    def at_zero(self):
        """Value with all infinitesimals set to zero: a rational or a RatFunc in the symbols."""
        c = self.constant_part()
        if c.den.is_const() and c.num.is_const():
            return _norm(Fraction(c.num.const_value()) / c.den.const_value())
        syms = self.ring.symbols
        num = c.num.with_gens(self.ring.gens)
        return RatFunc(_drop(num, self.ring), _drop(c.den, self.ring))

    def substitute(self, mapping: Mapping[str, "Series"]) -> "Series":
        """Simultaneously replace infinitesimal variables by series."""
        ring = self.ring
        ids = {ring.index(k): v for k, v in mapping.items()}
        cache: dict = {}
        keep_idx = [i for i in range(len(ring.gens)) if i not in ids]
        acc: dict[tuple, Series] = {}
        # group terms by the substituted exponent pattern
        for e, c in self.num.terms.items():
            pat = tuple(e[i] for i in ids)
            rest = tuple(0 if i in ids else e[i] for i in range(len(e)))
            acc.setdefault(pat, {})[rest] = c
        total = ring.zero()
        keys = list(ids)
        for pat, rest_terms in acc.items():
            factor = ring.one()
            for i, a in zip(keys, pat):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = ids[i] ** a
                    factor = factor * cache[key]
            rest = Series(ring, Poly._raw(ring.gens, rest_terms), ring._one, self.prec)
            total = total + rest * factor
        return Series(ring, total.num, _mul_den(total.den, self.den), total.prec)

    def __repr__(self) -> str:
        if self.den.is_const():
            return f"Series({self.num})"
        return f"Series(({self.num})/({self.den}))"


def _mul_den(a: Poly, b: Poly) -> Poly:
    if b.is_const():
        return a
    if a.is_const():
        return b
    return a * b


def _drop(p: Poly, ring: SeriesRing) -> Poly:
    k = ring.inf_count
    syms = ring.symbols
    return Poly(syms, {e[k:]: c for e, c in p.terms.items() if not any(e[:k])})


def _trunc_mul(ring: SeriesRing, a: Poly, b: Poly, prec: tuple) -> Poly:
    groups = ring.groups
    if not a.terms or not b.terms:
        return Poly._raw(ring.gens, {})
    A = [(e, c, tuple(sum(e[i] for i in ids) for ids in groups)) for e, c in a.terms.items()]
    B = [(e, c, tuple(sum(e[i] for i in ids) for ids in groups)) for e, c in b.terms.items()]
    A = [t for t in A if all(d <= p for d, p in zip(t[2], prec))]
    B = [t for t in B if all(d <= p for d, p in zip(t[2], prec))]
    out: dict = {}
    get = out.get
    ng = len(groups)
    for e1, c1, d1 in A:
        for e2, c2, d2 in B:
            ok = True
            for g in range(ng):
                if d1[g] + d2[g] > prec[g]:
                    ok = False
                    break
            if not ok:
                continue
            e = tuple(map(_add, e1, e2))
            out[e] = get(e, 0) + c1 * c2
    return Poly._raw(ring.gens, {e: _norm(c) for e, c in out.items() if c})
