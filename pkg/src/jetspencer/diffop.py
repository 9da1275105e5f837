"""Linear differential operators with polynomial-fraction coefficients.

An operator maps ``m_in`` unknown functions to ``m_out`` expressions:
``(P u)^a = sum coeffs[(a, k, mu)] * d_mu u^k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .symbolic import multiindex as mi
from .symbolic.linalg import ExactMatrix, primitive_integer, rref
from .symbolic.poly import Poly, Scalar
from .symbolic.ratfunc import RatFunc, format_ratfunc, parse_ratfunc, to_ratfunc


def _d(c, name):
    if isinstance(c, Scalar):
        return 0
    if name not in c.gens:
        return 0
    return c.diff(name)


def _dmulti(c, mu, xs):
    for i, a in enumerate(mu):
        for _ in range(a):
            c = _d(c, xs[i])
            if not c:
                return 0
    return c


def _clean(c):
    if isinstance(c, RatFunc):
        if c.is_const():
            v = c.const_value()
            return v.numerator if v.denominator == 1 else v
        if c.is_poly():
            return c.as_poly()
        return c
    if isinstance(c, Poly) and c.is_const():
        v = c.const_value()
        return v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class LinDiffOp:
    """Immutable sparse linear differential operator."""

    __slots__ = ("xs", "m_in", "m_out", "coeffs", "in_labels", "out_labels")

    def __init__(self, xs: Sequence[str], m_in: int, m_out: int, coeffs: dict | None = None,
                 in_labels: Sequence[str] | None = None, out_labels: Sequence[str] | None = None):
        self.xs = tuple(xs)
        self.m_in = m_in
        self.m_out = m_out
        clean = {}
        n = len(self.xs)
        for (a, k, mu), c in (coeffs or {}).items():
            if not (0 <= a < m_out and 0 <= k < m_in) or len(mu) != n:
                raise ValueError(f"coefficient key {(a, k, mu)} out of shape")
            c = _clean(c)
            if c:
                clean[(a, k, tuple(mu))] = c
        self.coeffs = clean
        self.in_labels = tuple(in_labels) if in_labels else tuple(f"u{k + 1}" for k in range(m_in))
        self.out_labels = tuple(out_labels) if out_labels else tuple(f"r{a + 1}" for a in range(m_out))

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def order(self) -> int:
        return max((sum(mu) for (_, _, mu) in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return all(isinstance(c, Scalar) for c in self.coeffs.values())

    def relabel(self, in_labels=None, out_labels=None) -> "LinDiffOp":
        return LinDiffOp(self.xs, self.m_in, self.m_out, self.coeffs,
                         in_labels or self.in_labels, out_labels or self.out_labels)

    def row(self, a: int) -> dict:
        return {(k, mu): c for (b, k, mu), c in self.coeffs.items() if b == a}

    def rows(self, idx: Iterable[int]) -> "LinDiffOp":
        idx = list(idx)
        pos = {a: j for j, a in enumerate(idx)}
        co = {(pos[a], k, mu): c for (a, k, mu), c in self.coeffs.items() if a in pos}
        return LinDiffOp(self.xs, self.m_in, len(idx), co, self.in_labels,
                         [self.out_labels[a] for a in idx])

    def __eq__(self, other):
        if not isinstance(other, LinDiffOp):
            return NotImplemented
        if (self.xs, self.m_in, self.m_out) != (other.xs, other.m_in, other.m_out):
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0) for k in keys)

    __hash__ = None

    def __add__(self, other: "LinDiffOp") -> "LinDiffOp":
        co = dict(self.coeffs)
        for k, c in other.coeffs.items():
            co[k] = co.get(k, 0) + c
        return LinDiffOp(self.xs, self.m_in, self.m_out, co, self.in_labels, self.out_labels)

    def __neg__(self) -> "LinDiffOp":
        return self.scale(-1)

    def __sub__(self, other: "LinDiffOp") -> "LinDiffOp":
        return self + (-other)

    def scale(self, c) -> "LinDiffOp":
        return LinDiffOp(self.xs, self.m_in, self.m_out, {k: v * c for k, v in self.coeffs.items()},
                         self.in_labels, self.out_labels)

    @classmethod
    def identity(cls, xs: Sequence[str], m: int) -> "LinDiffOp":
        z = mi.zero(len(xs))
        return cls(xs, m, m, {(a, a, z): 1 for a in range(m)})

    @classmethod
    def multiplication(cls, xs: Sequence[str], matrix: Sequence[Sequence]) -> "LinDiffOp":
        """Zero-order operator given by a coefficient matrix (rows = outputs)."""
        z = mi.zero(len(xs))
        m_out = len(matrix)
        m_in = len(matrix[0]) if m_out else 0
        return cls(xs, m_in, m_out, {(a, k, z): matrix[a][k] for a in range(m_out) for k in range(m_in)})

    def __str__(self) -> str:
        return describe(self)

    def __repr__(self) -> str:
        return f"LinDiffOp({self.m_out}x{self.m_in}, order {self.order}, {len(self.coeffs)} terms)"


# ----------------------------------------------------------------- operations
def apply(P: LinDiffOp, u: Sequence) -> list:
    if len(u) != P.m_in:
        raise ValueError(f"operator expects {P.m_in} inputs, got {len(u)}")
    out: list = [0] * P.m_out
    for (a, k, mu), c in P.coeffs.items():
        du = _dmulti(u[k], mu, P.xs)
        if du:
            out[a] = out[a] + c * du
    return [_clean(v) if isinstance(v, (RatFunc, Poly, Fraction)) else v for v in out]


def compose(Q: LinDiffOp, P: LinDiffOp) -> LinDiffOp:
    """Q o P with Leibniz expansion of d_nu (p u)."""
    if Q.m_in != P.m_out:
        raise ValueError(f"cannot compose: Q takes {Q.m_in}, P yields {P.m_out}")
    if Q.xs != P.xs:
        raise ValueError("operators on different coordinates")
    xs = P.xs
    by_row: dict = {}
    for (a, k, mu), c in P.coeffs.items():
        by_row.setdefault(a, []).append((k, mu, c))
    co: dict = {}
    deriv_cache: dict = {}
    for (b, a, nu), q in Q.coeffs.items():
        for k, mu, c in by_row.get(a, ()):
            for rho in mi.below(nu):
                key = (id(c), c, tuple(mi.sub(nu, rho))) if not isinstance(c, Scalar) else None
                if isinstance(c, Scalar):
                    dc = c if not any(mi.sub(nu, rho)) else 0
                else:
                    dk = (a, k, mu, mi.sub(nu, rho))
                    if dk not in deriv_cache:
                        deriv_cache[dk] = _dmulti(c, mi.sub(nu, rho), xs)
                    dc = deriv_cache[dk]
                if not dc:
                    continue
                lam = mi.add(mu, rho)
                term = q * dc * mi.binom(nu, rho)
                kk = (b, k, lam)
                co[kk] = co.get(kk, 0) + term
    return LinDiffOp(xs, P.m_in, Q.m_out, co, P.in_labels, Q.out_labels)


def formal_adjoint(P: LinDiffOp) -> LinDiffOp:
    """Standard formal adjoint: sum_a v_a (P u)^a - sum_k (ad P v)_k u^k is a divergence.

    ad(P)(k, a, mu) = sum_{nu >= mu} (-1)^|nu| binom(nu, mu) d_{nu - mu} coeffs(a, k, nu).
    """
    xs = P.xs
    co: dict = {}
    for (a, k, nu), c in P.coeffs.items():
        sign = -1 if sum(nu) % 2 else 1
        for mu in mi.below(nu):
            dc = _dmulti(c, mi.sub(nu, mu), xs) if not isinstance(c, Scalar) else (c if mu == nu else 0)
            if not dc:
                continue
            key = (k, a, mu)
            co[key] = co.get(key, 0) + dc * (sign * mi.binom(nu, mu))
    return LinDiffOp(xs, P.m_out, P.m_in, co, P.out_labels, P.in_labels)


# ------------------------------------------------- bilinear expressions / fluxes
class Bilinear:
    """Sum of c(x) * d_lam v_a * d_nu u_k, keyed by (a, lam, k, nu)."""

    __slots__ = ("xs", "terms")

    def __init__(self, xs: Sequence[str], terms: dict | None = None):
        self.xs = tuple(xs)
        self.terms = {}
        for key, c in (terms or {}).items():
            c = _clean(c)
            if c:
                self.terms[key] = c

    def __add__(self, other: "Bilinear") -> "Bilinear":
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return Bilinear(self.xs, t)

    def __neg__(self) -> "Bilinear":
        return Bilinear(self.xs, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Bilinear") -> "Bilinear":
        return self + (-other)

    def diff(self, i: int) -> "Bilinear":
        t: dict = {}
        for (a, lam, k, nu), c in self.terms.items():
            dc = _d(c, self.xs[i])
            if dc:
                t[(a, lam, k, nu)] = t.get((a, lam, k, nu), 0) + dc
            k1 = (a, mi.add_unit(lam, i), k, nu)
            t[k1] = t.get(k1, 0) + c
            k2 = (a, lam, k, mi.add_unit(nu, i))
            t[k2] = t.get(k2, 0) + c
        return Bilinear(self.xs, t)

    def is_zero(self) -> bool:
        return not self.terms


def pairing(P: LinDiffOp) -> Bilinear:
    """sum_a v_a (P u)^a."""
    z = mi.zero(P.n)
    return Bilinear(P.xs, {(a, z, k, mu): c for (a, k, mu), c in P.coeffs.items()})


def reverse_pairing(adP: LinDiffOp) -> Bilinear:
    """sum_k (ad P v)_k u^k, with adP mapping v (m_out of P) to m_in of P."""
    z = mi.zero(adP.n)
    return Bilinear(adP.xs, {(a, mu, k, z): c for (k, a, mu), c in adP.coeffs.items()})


@dataclass
class DivergenceCertificate:
    """Fluxes D^r with lhs - rhs = sum_r d_r D^r exactly."""

    xs: tuple
    fluxes: list
    lhs: Bilinear
    rhs: Bilinear

    def residual(self) -> Bilinear:
        div = Bilinear(self.xs)
        for r, D in enumerate(self.fluxes):
            div = div + D.diff(r)
        return self.lhs - self.rhs - div

    def verify(self) -> bool:
        return self.residual().is_zero()


def adjoint_with_certificate(P: LinDiffOp) -> tuple[LinDiffOp, DivergenceCertificate]:
    """Integrate by parts term by term, collecting fluxes; returns (ad P, certificate)."""
    xs, n = P.xs, P.n
    z = mi.zero(n)
    fluxes = [dict() for _ in range(n)]
    co: dict = {}
    for (a, k, nu), c in P.coeffs.items():
        L = {(a, z): c}  # linear expression in v: (a, lam) -> coefficient
        cur = nu
        while any(cur):
            i = mi.first_nonzero(cur)
            lower = mi.add_unit(cur, i, -1)
            for (b, lam), coef in L.items():
                key = (b, lam, k, lower)
                fluxes[i][key] = fluxes[i].get(key, 0) + coef
            newL: dict = {}
            for (b, lam), coef in L.items():
                dc = _d(coef, xs[i])
                if dc:
                    newL[(b, lam)] = newL.get((b, lam), 0) - dc
                key = (b, mi.add_unit(lam, i))
                newL[key] = newL.get(key, 0) - coef
            L = {kk: v for kk, v in newL.items() if v}
            cur = lower
        for (b, lam), coef in L.items():
            key = (k, b, lam)
            co[key] = co.get(key, 0) + coef
    ad = LinDiffOp(xs, P.m_out, P.m_in, co, P.out_labels, P.in_labels)
    cert = DivergenceCertificate(xs, [Bilinear(xs, f) for f in fluxes], pairing(P), reverse_pairing(ad))
    return ad, cert


# ------------------------------------------------------ compatibility conditions
def prolongation_matrix(P: LinDiffOp, s: int):
    """Rows d_nu (P u)^a for |nu| <= s written on the jets (k, lam) of u.

    Returns (rows, row_keys, col_keys).
    """
    xs, n = P.xs, P.n
    row_keys = [(a, nu) for a in range(P.m_out) for nu in mi.up_to(n, s)]
    qmax = s + P.order
    col_keys = [(k, lam) for k in range(P.m_in) for lam in mi.up_to(n, qmax)]
    col_index = {key: j for j, key in enumerate(col_keys)}
    rows = []
    by_row: dict = {}
    for (a, k, mu), c in P.coeffs.items():
        by_row.setdefault(a, []).append((k, mu, c))
    for a, nu in row_keys:
        row: list = [0] * len(col_keys)
        for k, mu, c in by_row.get(a, ()):
            for rho in mi.below(nu):
                dc = _dmulti(c, mi.sub(nu, rho), xs) if not isinstance(c, Scalar) else (c if rho == nu else 0)
                if not dc:
                    continue
                j = col_index[(k, mi.add(mu, rho))]
                row[j] = row[j] + dc * mi.binom(nu, rho)
        rows.append(row)
    return rows, row_keys, col_keys


def _op_from_vector(P: LinDiffOp, vec, row_keys) -> dict:
    return {(a, nu): c for (a, nu), c in zip(row_keys, vec) if c}


class EmptyAtBound(Exception):
    pass


@dataclass
class CompatibilityResult:
    operator: LinDiffOp
    orders: list = field(default_factory=list)
    bound: int = 0

    @property
    def empty(self) -> bool:
        return self.operator.m_out == 0


def compatibility_conditions(P: LinDiffOp, order_bound: int, out_labels: Sequence[str] | None = None,
                             raise_empty: bool = False) -> CompatibilityResult:
    """Generators of the operators Q with Q o P = 0 and order(Q) <= order_bound.

    For each order s the left kernel of the s-th prolongation matrix is the space
    of all such Q of order <= s; rows that are consequences of generators found
    at lower order (their derivatives and combinations) are discarded.
    """
    if order_bound < 1:
        raise ValueError("order_bound must be at least 1")
    xs, n = P.xs, P.n
    gens: list[tuple[int, dict]] = []  # (order, {(a, nu): coeff})
    constant = P.is_constant()
    for s in range(order_bound + 1):
        rows, row_keys, _ = prolongation_matrix(P, s)
        if not rows:
            continue
        M = ExactMatrix(rows, len(rows[0]))
        ker = M.left_kernel()
        if not ker:
            continue
        index = {key: j for j, key in enumerate(row_keys)}
        derived = []
        for order_g, g in gens:
            for rho in mi.up_to(n, s - order_g):
                v = [0] * len(row_keys)
                for (a, nu), c in g.items():
                    for sig in mi.below(rho):
                        dc = _dmulti(c, mi.sub(rho, sig), xs) if not isinstance(c, Scalar) else (c if sig == rho else 0)
                        if dc:
                            j = index[(a, mi.add(nu, sig))]
                            v[j] = v[j] + dc * mi.binom(rho, sig)
                derived.append(v)
        if constant:
            candidates = rref(ker, len(row_keys))
        else:
            candidates = ker
        base_rank = ExactMatrix(derived, len(row_keys)).rank() if derived else 0
        current = list(derived)
        for vec in candidates:
            trial = current + [vec]
            r = ExactMatrix(trial, len(row_keys)).rank()
            if r > base_rank:
                current = trial
                base_rank = r
                if constant:
                    vec = primitive_integer(vec)
                else:
                    vec = _primitive_rational(vec)
                gens.append((s, _op_from_vector(P, vec, row_keys)))
    co = {}
    for b, (_, g) in enumerate(gens):
        for (a, nu), c in g.items():
            co[(b, a, nu)] = c
    labels = out_labels or [f"c{b + 1}" for b in range(len(gens))]
    op = LinDiffOp(xs, P.m_out, len(gens), co, P.out_labels, labels)
    if raise_empty and not gens:
        raise EmptyAtBound(f"no compatibility condition up to order {order_bound}")
    return CompatibilityResult(op, [o for o, _ in gens], order_bound)


def _primitive_rational(vec):
    """Clear polynomial denominators of a kernel vector over Q(x)."""
    rs = [to_ratfunc(v) if not isinstance(v, Scalar) else v for v in vec]
    mult = None
    for r in rs:
        if isinstance(r, RatFunc) and not r.den.is_const():
            mult = r.den if mult is None else (mult if mult.divexact(r.den) is not None else mult * r.den)
    if mult is None:
        return [_clean(r) for r in rs]
    return [_clean(r * mult) for r in rs]


# --------------------------------------------------------------- text format
def to_text(P: LinDiffOp) -> str:
    """One line per coefficient: ``eq k mu_1 ... mu_n coeff`` after a header line."""
    lines = [f"# xs={','.join(P.xs)} m_in={P.m_in} m_out={P.m_out}"]
    for (a, k, mu) in sorted(P.coeffs, key=lambda t: (t[0], t[1], sum(t[2]), tuple(-x for x in t[2]))):
        c = to_ratfunc(P.coeffs[(a, k, mu)], P.xs).with_gens(P.xs)
        lines.append(" ".join([str(a), str(k), *map(str, mu), format_ratfunc(c)]))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> LinDiffOp:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0]
    if not head.startswith("#"):
        raise ValueError("missing header line")
    fields_ = dict(part.split("=", 1) for part in head[1:].split())
    xs = tuple(x for x in fields_["xs"].split(",") if x)
    m_in, m_out = int(fields_["m_in"]), int(fields_["m_out"])
    n = len(xs)
    co = {}
    for ln in lines[1:]:
        parts = ln.split(" ", 2 + n)
        a, k = int(parts[0]), int(parts[1])
        mu = tuple(int(x) for x in parts[2:2 + n])
        co[(a, k, mu)] = parse_ratfunc(parts[2 + n], xs)
    return LinDiffOp(xs, m_in, m_out, co)


# ------------------------------------------------------------------ display
def _dname(mu, xs) -> str:
    if not any(mu):
        return ""
    idx = "".join(str(i + 1) * a for i, a in enumerate(mu))
    return f"d{idx} "


def describe_row(P: LinDiffOp, a: int) -> str:
    parts = []
    for (k, mu), c in sorted(P.row(a).items(), key=lambda t: (-sum(t[0][1]), t[0][0], tuple(-x for x in t[0][1]))):
        cs = str(c) if not isinstance(c, Fraction) else f"{c.numerator}/{c.denominator}"
        if isinstance(c, (Poly, RatFunc)) and not (isinstance(c, Poly) and len(c.terms) == 1):
            cs = f"({cs})"
        if cs == "1":
            term = f"{_dname(mu, P.xs)}{P.in_labels[k]}"
        elif cs == "-1":
            term = f"-{_dname(mu, P.xs)}{P.in_labels[k]}"
        else:
            term = f"{cs}*{_dname(mu, P.xs)}{P.in_labels[k]}"
        parts.append(term)
    body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    return f"{P.out_labels[a]}: {body}"


def describe(P: LinDiffOp) -> str:
    return "\n".join(describe_row(P, a) for a in range(P.m_out))
