"""Finite jets of local diffeomorphisms and the nonlinear Spencer operator.

A q-jet of a map at a point is stored as its components ``f^k_mu`` for
``|mu| <= q``.  Values may be plain rationals (a jet at a point) or elements
of a ``SeriesRing`` whose infinitesimals ``s1..sn`` are a displacement of the
base point.  The second form carries enough Taylor data of a jet *section* to
take the x-derivatives needed by the Spencer operator, and optionally a
nilpotent ``t`` used for exact first-order variations.

Symbolic coefficients in that ring give the polynomial mode: either the
coordinates ``x1..xn`` themselves (jets given by polynomial maps) or free jet
symbols (identities in the jet coordinates of a generic section).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .symbolic import multiindex as mi
from .symbolic.poly import Poly
from .symbolic.ratfunc import RatFunc
from .symbolic.series import Series, SeriesRing

MAX_ORDER = 3


class SingularJet(ValueError):
    pass


class UnsupportedOrder(ValueError):
    pass


class OrderMismatch(ValueError):
    pass


# ------------------------------------------------------------ value helpers
def _is_zero(v) -> bool:
    if isinstance(v, (int, Fraction)):
        return v == 0
    return v.is_zero()


def _at0(v):
    return v.at_zero() if isinstance(v, Series) else v


def _inv(v):
    if isinstance(v, Series):
        if v.constant_part().is_zero():
            raise SingularJet("jet has a singular first-order part")
        return v.inverse()
    if _is_zero(v):
        raise SingularJet("jet has a singular first-order part")
    if isinstance(v, (int, Fraction)):
        return Fraction(1) / v
    return v.inverse()


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = 0
    for j in range(n):
        if _is_zero(M[0][j]):
            continue
        term = M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]])
        total = total + term if j % 2 == 0 else total - term
    return total


def _mat_inv(M):
    n = len(M)
    dinv = _inv(_det(M))
    if n == 1:
        return [[dinv]]
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1:] for r, row in enumerate(M) if r != j]
            c = _det(minor) * dinv
            out[i][j] = c if (i + j) % 2 == 0 else -c
    return out


# ----------------------------------------------- truncated Taylor polynomials
# dict mu -> coefficient of sigma^mu (not divided by mu!)
def _tp_mul(a: dict, b: dict, q: int) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        d1 = sum(m1)
        for m2, c2 in b.items():
            if d1 + sum(m2) > q:
                continue
            m = mi.add(m1, m2)
            out[m] = out[m] + c1 * c2 if m in out else c1 * c2
    return out


def _substitute(outer: dict, inner: Sequence[dict], q: int) -> dict:
    """sum_nu outer[nu] * prod_u inner[u]**nu_u, truncated at degree q."""
    if not outer:
        return {}
    n = len(inner)
    pows = {mi.zero(n): {mi.zero(n): 1}}

    def power(nu):
        if nu not in pows:
            u = mi.first_nonzero(nu)
            pows[nu] = _tp_mul(power(mi.add_unit(nu, u, -1)), inner[u], q)
        return pows[nu]

    out: dict = {}
    for nu in sorted(outer, key=sum):
        c = outer[nu]
        for m, v in power(nu).items():
            out[m] = out[m] + c * v if m in out else c * v
    return out


def _taylor(comps: Mapping, k: int, n: int, q: int, low: int = 1) -> dict:
    return {mu: comps[k, mu] * Fraction(1, mi.mfactorial(mu)) for mu in mi.up_to(n, q) if sum(mu) >= low}


# ------------------------------------------------------------------ contexts
class JetContext:
    """Series ring holding Taylor data about a base point.

    ``s_order`` bounds how many x-derivatives can later be taken; ``symbols``
    are free coefficients; ``nilpotent`` adds ``t`` with ``t**2 = 0``.
    """

    def __init__(self, n: int, s_order: int = 2, symbols: Sequence[str] = (), nilpotent: bool = False):
        self.n = n
        self.s_order = s_order
        self.s = tuple(f"s{i + 1}" for i in range(n))
        groups = [(self.s, s_order)]
        if nilpotent:
            groups.append((("t",), 1))
        self.nilpotent = nilpotent
        self.ring = SeriesRing(groups, symbols)

    def const(self, v) -> Series:
        return v if isinstance(v, Series) else self.ring.const(v)

    def var(self, name: str) -> Series:
        return self.ring.var(name)

    @property
    def t(self) -> Series:
        return self.ring.var("t")

    def point(self, values: Sequence | None = None, names: Sequence[str] | None = None) -> tuple:
        """x0 + s, with x0 numeric or (values None) the symbols ``names``."""
        if values is None:
            names = names or tuple(f"x{i + 1}" for i in range(self.n))
            return tuple(self.var(x) + self.var(s) for x, s in zip(names, self.s))
        return tuple(self.const(Fraction(v)) + self.var(s) for v, s in zip(values, self.s))

    def diff(self, v, i: int):
        return v.diff(self.s[i]) if isinstance(v, Series) else 0

    def t_part(self, v):
        return v.coefficient(("t",), (1,)) if isinstance(v, Series) else 0

    def with_prec(self, v: Series, s_prec: int) -> Series:
        return Series(self.ring, v.num, v.den, (min(s_prec, v.prec[0]),) + v.prec[1:])


# --------------------------------------------------------------------- jets
@dataclass(frozen=True)
class JetOfMap:
    """q-jet of a local map x -> y at ``source``; components keyed (k, mu)."""

    n: int
    q: int
    source: tuple
    comps: Mapping = field(repr=False)

    def __getitem__(self, key):
        return self.comps[key]

    @property
    def target(self) -> tuple:
        return tuple(self.comps[k, mi.zero(self.n)] for k in range(self.n))

    def linear_part(self) -> list:
        n = self.n
        return [[self.comps[k, mi.unit(n, i)] for i in range(n)] for k in range(n)]

    def det(self):
        return _det(self.linear_part())

    def truncate(self, q: int) -> "JetOfMap":
        if q > self.q:
            raise OrderMismatch(f"cannot raise order {self.q} to {q}")
        return JetOfMap(self.n, q, self.source, {key: v for key, v in self.comps.items() if sum(key[1]) <= q})

    def map_values(self, fn) -> "JetOfMap":
        return JetOfMap(self.n, self.q, tuple(fn(v) for v in self.source),
                        {key: fn(v) for key, v in self.comps.items()})

    def at_base(self) -> "JetOfMap":
        """Values at the base point (infinitesimals set to zero)."""
        return self.map_values(_at0)

    def equals(self, other: "JetOfMap") -> bool:
        if (self.n, self.q) != (other.n, other.q):
            return False
        return all(_is_zero(self.comps[key] - other.comps[key]) for key in self.comps)

    def check_invertible(self):
        d = self.det()
        if isinstance(d, Series):
            d = d.constant_part()
        if _is_zero(d):
            raise SingularJet("det(f^k_i) vanishes")


def identity_jet(n: int, q: int, point: Sequence) -> JetOfMap:
    comps = {}
    for k in range(n):
        for mu in mi.up_to(n, q):
            if sum(mu) == 0:
                comps[k, mu] = point[k]
            elif sum(mu) == 1:
                comps[k, mu] = Fraction(1 if mu[k] else 0)
            else:
                comps[k, mu] = Fraction(0)
    return JetOfMap(n, q, tuple(point), comps)


def _same_point(a: Sequence, b: Sequence) -> bool:
    return all(_is_zero(x - y) for x, y in zip(a, b))


def jet_compose(g: JetOfMap, f: JetOfMap) -> JetOfMap:
    """(g o f)_q by the multivariate chain rule; needs target(f) = source(g)."""
    if g.q != f.q or g.n != f.n:
        raise OrderMismatch(f"cannot compose jets of order {g.q} and {f.q}")
    if not _same_point(f.target, g.source):
        raise ValueError("target of f is not the source of g")
    n, q = f.n, f.q
    inner = [_taylor(f.comps, u, n, q) for u in range(n)]
    comps = {}
    for k in range(n):
        H = _substitute(_taylor(g.comps, k, n, q, low=0), inner, q)
        for mu in mi.up_to(n, q):
            comps[k, mu] = H.get(mu, 0) * mi.mfactorial(mu)
    return JetOfMap(n, q, f.source, comps)


def jet_invert(f: JetOfMap) -> JetOfMap:
    """Inverse jet, solved degree by degree from f(h(tau)) = tau."""
    n, q = f.n, f.q
    Linv = _mat_inv(f.linear_part())
    N = [_taylor(f.comps, k, n, q, low=2) for k in range(n)]
    h = [{mi.unit(n, k): Linv[i][k] for k in range(n)} for i in range(n)]
    for _ in range(q - 1):
        resid = []
        for k in range(n):
            r = {mi.unit(n, k): Fraction(1)}
            if N[k]:
                for m, v in _substitute(N[k], h, q).items():
                    r[m] = r[m] - v if m in r else -v
            resid.append(r)
        new = []
        for i in range(n):
            acc: dict = {}
            for k in range(n):
                for m, v in resid[k].items():
                    acc[m] = acc[m] + Linv[i][k] * v if m in acc else Linv[i][k] * v
            new.append(acc)
        h = new
    comps = {}
    for i in range(n):
        for mu in mi.up_to(n, q):
            comps[i, mu] = f.source[i] if sum(mu) == 0 else h[i].get(mu, 0) * mi.mfactorial(mu)
    return JetOfMap(n, q, f.target, comps)


# --------------------------------------------------------------- jet fields
@dataclass(frozen=True)
class JetField:
    """Jet section whose components are polynomial functions of ``xs``.

    Components need not be derivatives of one another.  The same shape holds
    jets of vector fields (xi^k_mu) used for variations.
    """

    xs: tuple
    q: int
    comps: Mapping = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.xs)

    @classmethod
    def holonomic(cls, maps: Sequence[Poly], q: int) -> "JetField":
        """j_q of an actual polynomial map."""
        xs = maps[0].gens
        n = len(xs)
        return cls(tuple(xs), q, {(k, mu): maps[k].diff_multi(mu) for k in range(n) for mu in mi.up_to(n, q)})

    @classmethod
    def identity(cls, xs: Sequence[str], q: int) -> "JetField":
        xs = tuple(xs)
        n = len(xs)
        comps = {}
        for k in range(n):
            for mu in mi.up_to(n, q):
                if sum(mu) == 0:
                    comps[k, mu] = Poly.var(xs, k)
                else:
                    comps[k, mu] = Poly.const(xs, 1 if sum(mu) == 1 and mu[k] else 0)
        return cls(xs, q, comps)

    def evaluate(self, ctx: JetContext, values: Sequence) -> JetOfMap:
        env = dict(zip(self.xs, values))
        comps = {key: ctx.const(p.evaluate(env)) for key, p in self.comps.items()}
        return JetOfMap(self.n, self.q, tuple(values), comps)

    def at(self, ctx: JetContext, point: Sequence | None = None) -> JetOfMap:
        return self.evaluate(ctx, ctx.point(point, self.xs if point is None else None))


def random_field(xs: Sequence[str], q: int, rng: random.Random, degree: int = 2,
                 near_identity: bool = True) -> JetField:
    """Random non-holonomic jet section with small rational polynomial components."""
    xs = tuple(xs)
    n = len(xs)
    monos = mi.up_to(n, degree)

    def rand_poly():
        return Poly(xs, {m: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for m in monos})

    comps = {}
    for k in range(n):
        for mu in mi.up_to(n, q):
            p = rand_poly()
            if near_identity and sum(mu) == 1 and mu[k]:
                p = p + 3
            comps[k, mu] = p
    return JetField(xs, q, comps)


def random_point_jet(n: int, q: int, rng: random.Random, point: Sequence | None = None) -> JetOfMap:
    """Random invertible numeric q-jet."""
    point = tuple(Fraction(v) for v in point) if point is not None else \
        tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n))
    while True:
        comps = {}
        for k in range(n):
            for mu in mi.up_to(n, q):
                comps[k, mu] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        jet = JetOfMap(n, q, point, comps)
        if jet.det() != 0:
            return jet


def generic_symbols(n: int, q: int, depth: Mapping[int, int] | int, prefix: str = "f") -> list[str]:
    out = []
    for k in range(n):
        for mu in mi.up_to(n, q):
            d = depth if isinstance(depth, int) else depth[sum(mu)]
            for nu in mi.up_to(n, d):
                out.append(_sym(prefix, k, mu, nu))
    return out


def _sym(prefix, k, mu, nu) -> str:
    return f"{prefix}{k + 1}_" + "".join(map(str, mu)) + "_" + "".join(map(str, nu))


def generic_jet(ctx: JetContext, q: int, depth: Mapping[int, int] | int, prefix: str = "f") -> JetOfMap:
    """Section with every Taylor coefficient of every component a free symbol.

    ``depth`` (per component order) is how many x-derivatives are kept; it
    must match the symbols declared in ``ctx``.
    """
    n = ctx.n
    comps = {}
    for k in range(n):
        for mu in mi.up_to(n, q):
            d = depth if isinstance(depth, int) else depth[sum(mu)]
            acc = ctx.ring.zero()
            for nu in mi.up_to(n, d):
                mono = ctx.var(_sym(prefix, k, mu, nu))
                for i, a in enumerate(nu):
                    for _ in range(a):
                        mono = mono * ctx.var(ctx.s[i])
                acc = acc + mono * Fraction(1, mi.mfactorial(nu))
            comps[k, mu] = ctx.with_prec(acc, d)
    return JetOfMap(n, q, tuple(ctx.var(s) for s in ctx.s), comps)


# ----------------------------------------------------------------- chi forms
@dataclass(frozen=True)
class ChiForm:
    """chi^k_{mu,i} for |mu| <= q, keyed (k, mu, i)."""

    n: int
    q: int
    comps: Mapping = field(repr=False)

    def __getitem__(self, key):
        return self.comps[key]

    def A(self) -> list:
        n, z = self.n, mi.zero(self.n)
        return [[self.comps[k, z, i] + (1 if k == i else 0) for i in range(n)] for k in range(n)]

    def values(self) -> "ChiForm":
        return ChiForm(self.n, self.q, {key: _at0(v) for key, v in self.comps.items()})

    def map_values(self, fn) -> "ChiForm":
        return ChiForm(self.n, self.q, {key: fn(v) for key, v in self.comps.items()})

    def truncate(self, q: int) -> "ChiForm":
        return ChiForm(self.n, q, {key: v for key, v in self.comps.items() if sum(key[1]) <= q})

    def apply(self, xi: Sequence) -> dict:
        """chi(xi)^k_mu = chi^k_{mu,i} xi^i."""
        n = self.n
        return {(k, mu): sum((self.comps[k, mu, i] * xi[i] for i in range(n)), 0)
                for k in range(n) for mu in mi.up_to(n, self.q)}

    def mismatches(self, other: "ChiForm") -> list:
        if (self.n, self.q) != (other.n, other.q):
            raise OrderMismatch("chi forms of different shape")
        return [key for key in self.comps if not _is_zero(self.comps[key] - other.comps[key])]

    def is_zero(self) -> bool:
        return all(_is_zero(v) for v in self.comps.values())

    def __eq__(self, other):
        if not isinstance(other, ChiForm):
            return NotImplemented
        return (self.n, self.q) == (other.n, other.q) and not self.mismatches(other)

    __hash__ = None


def _action(F: JetOfMap, X: Mapping, q: int) -> dict:
    """f_{q+1}(X)^k_mu = sum_{nu <= mu} binom(mu, nu) f^k_{mu-nu+1_r} X^r_nu."""
    n = F.n
    out = {}
    for k in range(n):
        for mu in mi.up_to(n, q):
            acc = 0
            for nu in mi.below(mu):
                b = mi.binom(mu, nu)
                base = mi.sub(mu, nu)
                for r in range(n):
                    acc = acc + b * F[k, mi.add_unit(base, r)] * X[r, nu]
            out[k, mu] = acc
    return out


def _solve_action(F: JetOfMap, G: list, rhs: Mapping, q: int) -> dict:
    """Triangular solve of f_{q+1}(X) = rhs; G is the inverse of f^k_r."""
    n = F.n
    X: dict = {}
    for mu in mi.up_to(n, q):
        red = []
        for k in range(n):
            v = rhs[k, mu]
            for nu in mi.below(mu):
                if nu == mu:
                    continue
                b = mi.binom(mu, nu)
                base = mi.sub(mu, nu)
                for r in range(n):
                    v = v - b * F[k, mi.add_unit(base, r)] * X[r, nu]
            red.append(v)
        for r in range(n):
            X[r, mu] = sum((G[r][k] * red[k] for k in range(n)), 0)
    return X


def nonlinear_spencer(F: JetOfMap, ctx: JetContext) -> ChiForm:
    """chi_q = D f_{q+1}, solved level by level from

    f^k_r chi^r_{mu,i} + ... + f^k_{mu+1_r} chi^r_{,i} = d_i f^k_mu - f^k_{mu+1_i}.
    """
    n, q = F.n, F.q - 1
    if q < 0:
        raise OrderMismatch("the Spencer operator needs a jet of order >= 1")
    F.check_invertible()
    G = _mat_inv(F.linear_part())
    comps: dict = {}
    for i in range(n):
        rhs = {(k, mu): ctx.diff(F[k, mu], i) - F[k, mi.add_unit(mu, i)]
               for k in range(n) for mu in mi.up_to(n, q)}
        for (r, mu), v in _solve_action(F, G, rhs, q).items():
            comps[r, mu, i] = v
    return ChiForm(n, q, comps)


def chi_low_order(F: JetOfMap, ctx: JetContext) -> ChiForm:
    """Closed forms chi^k_{,i} = g^k_l d_i f^l - delta and
    chi^k_{j,i} = g^k_l (d_i f^l_j - A^r_i f^l_{rj})."""
    n = F.n
    z = mi.zero(n)
    g = _mat_inv(F.linear_part())
    A = [[sum((g[k][l] * ctx.diff(F[l, z], i) for l in range(n)), 0) for i in range(n)] for k in range(n)]
    comps = {}
    for k in range(n):
        for i in range(n):
            comps[k, z, i] = A[k][i] - (1 if k == i else 0)
    if F.q >= 2:
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    ej = mi.unit(n, j)
                    acc = 0
                    for l in range(n):
                        inner = ctx.diff(F[l, ej], i)
                        for r in range(n):
                            inner = inner - A[r][i] * F[l, mi.add_unit(ej, r)]
                        acc = acc + g[k][l] * inner
                    comps[k, ej, i] = acc
    return ChiForm(n, min(F.q - 1, 1), comps)


def spencer_by_composition(F: JetOfMap, ctx: JetContext) -> ChiForm:
    """chi_q at the base point as d/ds of f_{q+1}(x0)^{-1} o f_q(x0 + s), minus id."""
    n, q = F.n, F.q - 1
    base = F.map_values(lambda v: v.constant_part() if isinstance(v, Series) else v)
    G = jet_invert(base)
    inner = []
    for u in range(n):
        tp = _taylor(F.comps, u, n, q)
        tp[mi.zero(n)] = F[u, mi.zero(n)] - base[u, mi.zero(n)]
        inner.append(tp)
    comps = {}
    for k in range(n):
        H = _substitute(_taylor(G.comps, k, n, F.q, low=1), inner, q)
        for mu in mi.up_to(n, q):
            v = H.get(mu, 0) * mi.mfactorial(mu)
            for i in range(n):
                d = _at0(ctx.diff(v, i)) if isinstance(v, Series) else 0
                comps[k, mu, i] = d - (1 if sum(mu) == 0 and k == i else 0)
    return ChiForm(n, q, comps)


def inductive_residuals(chi: ChiForm, F: JetOfMap, ctx: JetContext) -> list:
    """Left minus right side of the defining relation; all zero for chi = D F."""
    n, q = chi.n, chi.q
    out = []
    for i in range(n):
        X = {(r, mu): chi[r, mu, i] for r in range(n) for mu in mi.up_to(n, q)}
        lhs = _action(F, X, q)
        for (k, mu), v in lhs.items():
            out.append(v - (ctx.diff(F[k, mu], i) - F[k, mi.add_unit(mu, i)]))
    return out


def compatibility_residuals(chi: ChiForm, ctx: JetContext) -> tuple[list, list]:
    """The two identities satisfied by chi = D f.

    d_i A^k_j - d_j A^k_i - A^r_i chi^k_{r,j} + A^r_j chi^k_{r,i}   (needs chi_1)
    d_i chi^k_{l,j} - d_j chi^k_{l,i} - chi^r_{l,i} chi^k_{r,j} + chi^r_{l,j} chi^k_{r,i}
        - A^r_i chi^k_{lr,j} + A^r_j chi^k_{lr,i}                   (needs chi_2)
    """
    n = chi.n
    A = chi.A()
    e = lambda r: mi.unit(n, r)  # noqa: E731
    first, second = [], []
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if chi.q >= 1:
        for k in range(n):
            for i, j in pairs:
                v = ctx.diff(A[k][j], i) - ctx.diff(A[k][i], j)
                for r in range(n):
                    v = v - A[r][i] * chi[k, e(r), j] + A[r][j] * chi[k, e(r), i]
                first.append(_at0(v))
    if chi.q >= 2:
        for k in range(n):
            for l in range(n):
                for i, j in pairs:
                    v = ctx.diff(chi[k, e(l), j], i) - ctx.diff(chi[k, e(l), i], j)
                    for r in range(n):
                        v = v - chi[r, e(l), i] * chi[k, e(r), j] + chi[r, e(l), j] * chi[k, e(r), i]
                        lr = mi.add_unit(e(l), r)
                        v = v - A[r][i] * chi[k, lr, j] + A[r][j] * chi[k, lr, i]
                    second.append(_at0(v))
    return first, second


# ------------------------------------------------------------ gauge action
def gauge_transform_chi(chi: ChiForm, F: JetOfMap, ctx: JetContext) -> ChiForm:
    """chi' = f_{q+1}^{-1} o chi o j_1(f_q) + D f_{q+1}.

    ``chi`` holds values at the target point f(x0); ``F`` is the (q+1)-jet
    section about x0.  The result carries the displacement of x0.
    """
    n, q = chi.n, chi.q
    if F.q != q + 1:
        raise OrderMismatch(f"need a jet of order {q + 1}, got {F.q}")
    D = nonlinear_spencer(F, ctx)
    G = _mat_inv(F.linear_part())
    inner = [_taylor(F.comps, u, n, q) for u in range(n)]
    z = mi.zero(n)
    comps = {}
    for i in range(n):
        dF = [ctx.diff(F[u, z], i) for u in range(n)]
        pulled = {}
        for k in range(n):
            zeta = {nu: sum((chi[k, nu, u] * dF[u] for u in range(n)), 0) * Fraction(1, mi.mfactorial(nu))
                    for nu in mi.up_to(n, q)}
            H = _substitute(zeta, inner, q)
            for mu in mi.up_to(n, q):
                pulled[k, mu] = H.get(mu, 0) * mi.mfactorial(mu)
        X = _solve_action(F, G, pulled, q)
        for (r, mu), v in X.items():
            comps[r, mu, i] = v + D[r, mu, i]
    return ChiForm(n, q, comps)


def compose_fields(g: JetField, F: JetOfMap, ctx: JetContext) -> JetOfMap:
    """(g o f)_q as a section: g's jets taken at f(x), composed with f's jets."""
    return jet_compose(g.evaluate(ctx, F.target).truncate(F.q), F)


# ---------------------------------------------------------------- variations
@dataclass(frozen=True)
class VariationReport:
    q: int
    reference: str
    results: Mapping
    mismatches: Mapping
    eta_matches: bool

    @property
    def agree(self) -> bool:
        return self.eta_matches and not any(self.mismatches.values())


def linear_spencer(xi: JetOfMap, ctx: JetContext, q: int) -> ChiForm:
    """d xi_{q+1}: d_i xi^k_mu - xi^k_{mu+1_i}."""
    n = xi.n
    return ChiForm(n, q, {(k, mu, i): ctx.diff(xi[k, mu], i) - xi[k, mi.add_unit(mu, i)]
                          for k in range(n) for mu in mi.up_to(n, q) for i in range(n)})


def _source_formula(chi: ChiForm, xi: JetOfMap, ctx: JetContext) -> ChiForm:
    """Explicit variation for q = 0, 1 in terms of xi and chi."""
    n, q = chi.n, chi.q
    z = mi.zero(n)
    e = lambda r: mi.unit(n, r)  # noqa: E731
    X = lambda k, *idx: xi[k, mi.from_indices(n, idx)]  # noqa: E731
    comps = {}
    for k in range(n):
        for i in range(n):
            v = ctx.diff(X(k), i) - X(k, i)
            for r in range(n):
                v = v + X(r) * ctx.diff(chi[k, z, i], r) + chi[k, z, r] * ctx.diff(X(r), i) \
                    - chi[r, z, i] * X(k, r)
            comps[k, z, i] = v
    if q >= 1:
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    v = ctx.diff(X(k, j), i) - X(k, i, j)
                    for r in range(n):
                        v = v + X(r) * ctx.diff(chi[k, e(j), i], r) + chi[k, e(j), r] * ctx.diff(X(r), i) \
                            + chi[k, e(r), i] * X(r, j) - chi[r, e(j), i] * X(k, r) - chi[r, z, i] * X(k, j, r)
                    comps[k, e(j), i] = v
    return ChiForm(n, q, comps)


def _bar_formula_q0(chi1: ChiForm, xibar: Mapping, ctx: JetContext) -> ChiForm:
    """q = 0 in terms of xibar = xi + chi(xi):
    (d_i xibar^s - xibar^s_i) + (chi^s_{r,i} xibar^r - chi^r_{,i} xibar^s_r)."""
    n = chi1.n
    z = mi.zero(n)
    comps = {}
    for s in range(n):
        for i in range(n):
            v = ctx.diff(xibar[s, z], i) - xibar[s, mi.unit(n, i)]
            for r in range(n):
                v = v + chi1[s, mi.unit(n, r), i] * xibar[r, z] - chi1[r, z, i] * xibar[s, mi.unit(n, r)]
            comps[s, z, i] = v
    return ChiForm(n, 0, comps)


def _target_formula(F: JetOfMap, chi: ChiForm, V: Mapping, ctx: JetContext) -> ChiForm:
    """f_{q+1}^{-1} o d_Y eta o j_1(f_q) written on the source: solve
    f_{q+1}(dchi_i) = d_i V_mu - V_{mu+1_i} - sum binom(mu,nu) V_{mu-nu+1_r} chi^r_{nu,i}."""
    n, q = chi.n, chi.q
    G = _mat_inv(F.linear_part())
    comps = {}
    for i in range(n):
        rhs = {}
        for k in range(n):
            for mu in mi.up_to(n, q):
                v = ctx.diff(V[k, mu], i) - V[k, mi.add_unit(mu, i)]
                for nu in mi.below(mu):
                    b = mi.binom(mu, nu)
                    base = mi.sub(mu, nu)
                    for r in range(n):
                        v = v - b * V[k, mi.add_unit(base, r)] * chi[r, nu, i]
                rhs[k, mu] = v
        for (r, mu), v in _solve_action(F, G, rhs, q).items():
            comps[r, mu, i] = v
    return ChiForm(n, q, comps)


def variation_check(f: JetField, xi: JetField, q: int, mode: str = "source",
                    point: Sequence | None = None) -> VariationReport:
    """delta chi_q computed several ways and compared at the base point.

    perturb-source   t-part of D(f o (id + t xi))
    perturb-target   t-part of D(f + t eta), eta = f_{q+1}(xi + chi(xi))
    formula-source   explicit component formulas in xi and chi
    formula-target   f^{-1} o d_Y eta o j_1(f) solved on the source
    formula-bar      (q = 0) the same in terms of xibar only
    ``mode`` picks the perturbation used as reference.
    """
    if q not in (0, 1):
        raise UnsupportedOrder(f"variations are implemented for q = 0, 1 (got {q})")
    if mode not in ("source", "target"):
        raise ValueError(f"mode must be 'source' or 'target', not {mode!r}")
    if f.q < q + 2 or xi.q < q + 1:
        raise OrderMismatch(f"need f of order {q + 2} and xi of order {q + 1}")
    n = f.n
    ctx = JetContext(n, s_order=2, symbols=f.xs if point is None else (), nilpotent=True)
    X0 = ctx.point(point, f.xs if point is None else None)
    F2 = JetField(f.xs, q + 2, {k: v for k, v in f.comps.items() if sum(k[1]) <= q + 2}).evaluate(ctx, X0)
    F = F2.truncate(q + 1)
    Xi = JetField(xi.xs, q + 1, {k: v for k, v in xi.comps.items() if sum(k[1]) <= q + 1}).evaluate(ctx, X0)
    z = mi.zero(n)
    xi0 = [Xi[k, z] for k in range(n)]
    t = ctx.t

    chi = nonlinear_spencer(F, ctx)
    chi_hi = nonlinear_spencer(F2, ctx)

    # f o (id + t xi): the jets of f at x + t xi composed with id + t xi_{q+1}
    shifted = {key: v + t * sum((xi0[r] * ctx.diff(v, r) for r in range(n)), 0) for key, v in F.comps.items()}
    h = {}
    for k in range(n):
        for mu in mi.up_to(n, q + 1):
            idv = X0[k] if sum(mu) == 0 else Fraction(1 if sum(mu) == 1 and mu[k] else 0)
            h[k, mu] = idv + t * Xi[k, mu]
    H = JetOfMap(n, q + 1, X0, h)
    Ft = jet_compose(JetOfMap(n, q + 1, H.target, shifted), H)
    d_source = nonlinear_spencer(Ft, ctx).map_values(ctx.t_part)

    # eta = f_{q+2}(xibar_{q+1})
    chi_xi = chi_hi.apply(xi0)
    xibar = {key: Xi[key] + chi_xi[key] for key in Xi.comps}
    V = _action(F2, xibar, q + 1)
    eta_matches = all(_is_zero(_at0(ctx.t_part(Ft[key]) - V[key])) for key in V)

    Ft2 = JetOfMap(n, q + 1, X0, {key: F[key] + t * V[key] for key in F.comps})
    d_target = nonlinear_spencer(Ft2, ctx).map_values(ctx.t_part)

    results = {
        "perturb-source": d_source,
        "perturb-target": d_target,
        "formula-source": _source_formula(chi, Xi, ctx),
        "formula-target": _target_formula(F, chi, V, ctx),
    }
    if q == 0:
        results["formula-bar"] = _bar_formula_q0(chi_hi, xibar, ctx)
    results = {name: c.values() for name, c in results.items()}
    ref = "perturb-" + mode
    mism = {name: results[ref].mismatches(c) for name, c in results.items() if name != ref}
    return VariationReport(q, ref, results, mism, eta_matches)


__all__ = [
    "ChiForm",
    "JetContext",
    "JetField",
    "JetOfMap",
    "OrderMismatch",
    "SingularJet",
    "UnsupportedOrder",
    "VariationReport",
    "chi_low_order",
    "compatibility_residuals",
    "compose_fields",
    "gauge_transform_chi",
    "generic_jet",
    "generic_symbols",
    "identity_jet",
    "inductive_residuals",
    "jet_compose",
    "jet_invert",
    "linear_spencer",
    "nonlinear_spencer",
    "random_field",
    "random_point_jet",
    "spencer_by_composition",
    "variation_check",
]
