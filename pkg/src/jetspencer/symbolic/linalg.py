"""Exact dense linear algebra by fraction-free (Bareiss) elimination.

Entries may be rationals or elements of the fraction field of polynomials.
Rational matrices are scaled to integer rows first; polynomial-fraction
matrices are cleared of denominators row by row and eliminated over the
polynomial ring with exact division.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .poly import Poly, Scalar
from .ratfunc import RatFunc, to_ratfunc


def _is_scalar_rows(rows) -> bool:
    return all(isinstance(x, Scalar) for row in rows for x in row)


def _integer_rows(rows) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            if type(x) is Fraction:
                den = lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _poly_rows(rows) -> tuple[list[list[Poly]], tuple]:
    gens: tuple = ()
    for row in rows:
        for x in row:
            if isinstance(x, (Poly, RatFunc)):
                for g in x.gens:
                    if g not in gens:
                        gens = gens + (g,)
    out = []
    for row in rows:
        rs = [to_ratfunc(x, gens).with_gens(gens) for x in row]
        mult = Poly.const(gens, 1)
        for r in rs:
            if r.den.is_const():
                continue
            if mult.divexact(r.den) is None:
                mult = mult * r.den
        prow = []
        for r in rs:
            if not r.num.terms:
                prow.append(Poly.const(gens, 0))
                continue
            q = mult.divexact(r.den)
            prow.append(r.num * q)
        out.append(prow)
    return out, gens


def bareiss_echelon(rows, ncols: int, exact_div=None):
    """Fraction-free forward elimination.

    Returns (echelon rows, pivot columns, permutation sign).  Works over the
    integers (``//``) or polynomials (``divexact``).
    """
    M = [list(r) for r in rows]
    nrows = len(M)
    if exact_div is None:
        exact_div = lambda a, b: a // b
    prev = 1
    r = 0
    pivots = []
    sign = 1
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if M[i][c]), None)
        if p is None:
            continue
        if p != r:
            M[r], M[p] = M[p], M[r]
            sign = -sign
        piv = M[r][c]
        rowr = M[r]
        for i in range(r + 1, nrows):
            rowi = M[i]
            a = rowi[c]
            for j in range(c + 1, ncols):
                v = piv * rowi[j] - a * rowr[j]
                rowi[j] = exact_div(v, prev) if v else v * 0
            rowi[c] = a * 0
        prev = piv
        pivots.append(c)
        r += 1
    return M, pivots, sign


def _poly_div(a: Poly, b) -> Poly:
    if isinstance(b, int):
        return a.scale(Fraction(1, b)) if b != 1 else a
    q = a.divexact(b)
    if q is None:
        raise ArithmeticError("Bareiss division was not exact")
    return q


class ExactMatrix:
    """Immutable exact matrix; rows are tuples of rationals or polynomial fractions."""

    __slots__ = ("rows", "nrows", "ncols", "_echelon")

    def __init__(self, rows: Iterable[Sequence], ncols: int | None = None):
        self.rows = tuple(tuple(r) for r in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            if not self.rows:
                raise ValueError("column count required for an empty matrix")
            ncols = len(self.rows[0])
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        self._echelon = None

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "ExactMatrix":
        return cls([[0] * n for _ in range(m)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def is_rational(self) -> bool:
        return _is_scalar_rows(self.rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)], self.nrows)

    T = property(transpose)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in product")
        cols = other.transpose().rows
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                s = 0
                for a, b in zip(r, c):
                    if a and b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return ExactMatrix(out, other.ncols)

    def apply(self, v: Sequence) -> list:
        if len(v) != self.ncols:
            raise ValueError("shape mismatch")
        out = []
        for r in self.rows:
            s = 0
            for a, b in zip(r, v):
                if a and b:
                    s = s + a * b
            out.append(s)
        return out

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    __hash__ = None

    # ------------------------------------------------------------ elimination
    def _eliminate(self):
        if self._echelon is None:
            if self.is_rational():
                M, piv, sign = bareiss_echelon(_integer_rows(self.rows), self.ncols)
                object.__setattr__(self, "_echelon", ("Q", M, piv, sign, ()))
            else:
                rows, gens = _poly_rows(self.rows)
                M, piv, sign = bareiss_echelon(rows, self.ncols, _poly_div)
                object.__setattr__(self, "_echelon", ("K", M, piv, sign, gens))
        return self._echelon

    def rank(self) -> int:
        return len(self._eliminate()[2])

    def kernel(self) -> list[list]:
        """Basis of the right kernel, one vector per free column."""
        kind, M, piv, _, gens = self._eliminate()
        free = [c for c in range(self.ncols) if c not in set(piv)]
        basis = []
        for f in free:
            x: list = [0] * self.ncols
            x[f] = 1
            for r in range(len(piv) - 1, -1, -1):
                c = piv[r]
                s = 0
                row = M[r]
                for j in range(c + 1, self.ncols):
                    if row[j] and x[j]:
                        s = s + row[j] * x[j]
                if kind == "Q":
                    x[c] = Fraction(-s, row[c]) if s else 0
                else:
                    x[c] = to_ratfunc(-s, gens) / row[c] if s else 0
            basis.append([_simplify(v) for v in x])
        return basis

    def left_kernel(self) -> list[list]:
        return self.transpose().kernel()

    def det(self):
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        kind, M, piv, sign, _ = self._eliminate()
        if len(piv) < self.nrows:
            return 0
        d = M[-1][-1] * sign
        if kind == "Q":
            # undo the integer row scaling
            scale = 1
            for row in self.rows:
                den = 1
                for x in row:
                    if type(x) is Fraction:
                        den = lcm(den, x.denominator)
                scale *= den
            return _simplify(Fraction(d, scale))
        rows, _ = _poly_rows(self.rows)
        mult = 1
        for orig, cleared in zip(self.rows, rows):
            for a, b in zip(orig, cleared):
                if a:
                    mult = mult * (to_ratfunc(b) / to_ratfunc(a))
                    break
        return _simplify(to_ratfunc(d) / mult)

    def solve(self, b: Sequence) -> list | None:
        """One solution x of self @ x = b, or None when inconsistent."""
        aug = ExactMatrix([list(r) + [v] for r, v in zip(self.rows, b)], self.ncols + 1)
        ker = aug.kernel()
        for v in ker:
            last = v[-1]
            if last:
                return [_simplify(_div(-x, last)) for x in v[:-1]]
        return None

    def rref(self) -> list[list]:
        return rref(self.rows, self.ncols)


def _div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    if isinstance(a, Scalar) and isinstance(b, Scalar):
        return Fraction(a) / b
    return to_ratfunc(a) / b


def _simplify(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    if isinstance(v, RatFunc) and v.is_const():
        c = v.const_value()
        return c.numerator if c.denominator == 1 else c
    return v


def rref(rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Reduced row echelon form (nonzero rows only) over the rationals."""
    M = [[Fraction(x) for x in r] for r in rows]
    out = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        M[r] = [x / piv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    for row in M[:r]:
        out.append([_simplify(x) for x in row])
    return out


def exact_rank(m) -> int:
    return (m if isinstance(m, ExactMatrix) else ExactMatrix(m)).rank()


def exact_kernel(m) -> list[list]:
    return (m if isinstance(m, ExactMatrix) else ExactMatrix(m)).kernel()


def primitive_integer(vec: Sequence) -> list:
    """Scale a rational vector to coprime integers with a positive first nonzero entry."""
    from math import gcd

    den = 1
    for x in vec:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return ints
    first = next(v for v in ints if v)
    if first < 0:
        g = -g
    return [v // g for v in ints]
