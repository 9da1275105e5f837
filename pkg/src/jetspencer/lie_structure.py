"""Vector fields, structure constants and the gauge calculus of a Lie algebra.

Conventions
-----------
* ``[v, w]^k = v^r d_r w^k - w^r d_r v^k``.
* Structure constants ``c[tau][rho][sigma]`` satisfy ``[t_rho, t_sigma] = c^tau_{rho sigma} t_tau``.
* A gauge potential is an ``n x p`` array ``A[i][tau]``; the curvature is
  ``F^tau_ij = d_i A^tau_j - d_j A^tau_i - c^tau_{rho sigma} A^rho_i A^sigma_j``.
* The covariant derivative on 0-forms is ``d_i lam^tau - c^tau_{rho sigma} A^rho_i lam^sigma``
  and on r-forms ``nabla(alpha (x) lam) = d alpha (x) lam + (-1)^r alpha ^ nabla lam``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .symbolic.linalg import ExactMatrix
from .symbolic.multiindex import wedge_basis, wedge_insert
from .symbolic.poly import Poly
from .symbolic.ratfunc import RatFunc


class NotClosed(Exception):
    def __init__(self, pair, bracket):
        super().__init__(f"bracket of generators {pair} leaves their span")
        self.pair = pair
        self.bracket = bracket


def _zero_like(x):
    return x * 0


def _d(expr, name):
    if isinstance(expr, (int, Fraction)):
        return 0
    if name not in expr.gens:
        return _zero_like(expr)
    return expr.diff(name)


@dataclass(frozen=True)
class VectorField:
    """Components ``theta^k(x)`` over the coordinate names ``xs``."""

    xs: tuple
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(self.xs))
        comps = tuple(c if isinstance(c, (Poly, RatFunc)) else Poly.const(self.xs, c) for c in self.components)
        if len(comps) != len(self.xs):
            raise ValueError(f"{len(comps)} components for {len(self.xs)} coordinates")
        object.__setattr__(self, "components", comps)

    @property
    def n(self) -> int:
        return len(self.xs)

    def __getitem__(self, k):
        return self.components[k]

    def apply(self, f):
        """Lie derivative of a function: v^r d_r f."""
        out = 0
        for r, x in enumerate(self.xs):
            if self.components[r]:
                out = out + self.components[r] * _d(f, x)
        return out

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xs, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xs, [a - b for a, b in zip(self.components, other.components)])

    def scale(self, c) -> "VectorField":
        return VectorField(self.xs, [a * c for a in self.components])

    def is_zero(self) -> bool:
        return all(not c for c in self.components)

    def divergence(self):
        out = 0
        for r, x in enumerate(self.xs):
            out = out + _d(self.components[r], x)
        return out

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.xs == other.xs and all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def __str__(self) -> str:
        parts = []
        for x, c in zip(self.xs, self.components):
            if c:
                parts.append(f"({c})*d_{x}")
        return " + ".join(parts) if parts else "0"


def bracket(v: VectorField, w: VectorField) -> VectorField:
    if v.xs != w.xs:
        raise ValueError("vector fields live on different coordinates")
    return VectorField(v.xs, [v.apply(w[k]) - w.apply(v[k]) for k in range(v.n)])


def _flatten(fields: Sequence[VectorField]):
    """Coefficient vectors of polynomial vector fields over a shared monomial list."""
    keys: dict = {}
    for f in fields:
        for k, c in enumerate(f.components):
            if isinstance(c, RatFunc):
                c = c.as_poly()
            for e in c.terms:
                keys.setdefault((k, e), len(keys))
    vecs = []
    for f in fields:
        v = [0] * len(keys)
        for k, c in enumerate(f.components):
            if isinstance(c, RatFunc):
                c = c.as_poly()
            for e, a in c.terms.items():
                v[keys[(k, e)]] = a
        vecs.append(v)
    return vecs, len(keys)


@dataclass(frozen=True)
class StructureConstants:
    """``c[tau][rho][sigma]`` with ``[t_rho, t_sigma] = c^tau_{rho sigma} t_tau``."""

    c: tuple

    @classmethod
    def from_array(cls, arr) -> "StructureConstants":
        return cls(tuple(tuple(tuple(x for x in row) for row in mat) for mat in arr))

    @classmethod
    def zero(cls, p: int) -> "StructureConstants":
        return cls.from_array([[[0] * p for _ in range(p)] for _ in range(p)])

    @property
    def dim(self) -> int:
        return len(self.c)

    def __call__(self, tau, rho, sigma):
        return self.c[tau][rho][sigma]

    def nonzero(self) -> dict:
        p = self.dim
        return {
            (t, r, s): self.c[t][r][s]
            for t, r, s in product(range(p), repeat=3)
            if self.c[t][r][s]
        }

    def with_entry(self, tau, rho, sigma, value) -> "StructureConstants":
        arr = [[list(row) for row in mat] for mat in self.c]
        arr[tau][rho][sigma] = value
        return StructureConstants.from_array(arr)


def structure_constants(generators: Sequence[VectorField]) -> StructureConstants:
    """Solve ``[t_rho, t_sigma] = c^tau_{rho sigma} t_tau`` exactly.

    Raises ``NotClosed`` with the offending pair when a bracket leaves the span,
    and ``ValueError`` when the generators are dependent.
    """
    p = len(generators)
    brackets = {}
    for r in range(p):
        for s in range(r + 1, p):
            brackets[(r, s)] = bracket(generators[r], generators[s])
    vecs, m = _flatten(list(generators) + list(brackets.values()))
    gen_vecs = vecs[:p]
    G = ExactMatrix([[gen_vecs[t][j] for t in range(p)] for j in range(m)], p) if m else None
    if G is None or G.rank() < p:
        raise ValueError("generators are linearly dependent")
    arr = [[[0] * p for _ in range(p)] for _ in range(p)]
    for idx, ((r, s), br) in enumerate(brackets.items()):
        rhs = vecs[p + idx]
        sol = G.solve(rhs)
        if sol is None:
            raise NotClosed((r, s), br)
        for t in range(p):
            arr[t][r][s] = sol[t]
            arr[t][s][r] = -sol[t]
    return StructureConstants.from_array(arr)


@dataclass
class CheckResult:
    ok: bool
    witness: object = None
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def jacobi_check(c: StructureConstants) -> CheckResult:
    """Antisymmetry and the Jacobi sum over every index tuple."""
    p = c.dim
    for t, r, s in product(range(p), repeat=3):
        if c(t, r, s) + c(t, s, r) != 0:
            return CheckResult(False, ("antisymmetry", t, r, s))
    for lam, rho, sig, tau in product(range(p), repeat=4):
        total = 0
        for mu in range(p):
            total += (
                c(lam, mu, rho) * c(mu, sig, tau)
                + c(lam, mu, sig) * c(mu, tau, rho)
                + c(lam, mu, tau) * c(mu, rho, sig)
            )
        if total != 0:
            return CheckResult(False, ("jacobi", lam, rho, sig, tau), {"sum": total})
    return CheckResult(True)


@dataclass(frozen=True)
class MCForms:
    """``omega[tau][r] = omega^tau_r(a)`` and ``alpha[rho][r] = alpha^r_rho(a)`` over group coordinates."""

    coords: tuple
    omega: tuple
    alpha: tuple


def mc_verify(forms: MCForms, c: StructureConstants) -> CheckResult:
    """Check ``d omega + c omega omega = 0`` componentwise and ``alpha . omega = id``."""
    p = c.dim
    a = forms.coords
    om, al = forms.omega, forms.alpha
    if len(om) != p or len(al) != p or len(a) != p:
        raise ValueError("shape mismatch between forms and structure constants")
    for tau in range(p):
        for r in range(p):
            for s in range(p):
                val = _d(om[tau][s], a[r]) - _d(om[tau][r], a[s])
                for rho in range(p):
                    for sig in range(p):
                        if c(tau, rho, sig):
                            val = val + om[rho][r] * om[sig][s] * c(tau, rho, sig)
                if val != 0:
                    return CheckResult(False, ("maurer-cartan", tau, r, s), {"residual": str(val)})
    for rho in range(p):
        for tau in range(p):
            val = 0
            for r in range(p):
                val = val + al[rho][r] * om[tau][r]
            if val != (1 if rho == tau else 0):
                return CheckResult(False, ("inverse", rho, tau), {"value": str(val)})
    for rho in range(p):
        for sig in range(p):
            # [alpha_rho, alpha_sigma] = c^tau_{rho sigma} alpha_tau
            v = VectorField(a, al[rho])
            w = VectorField(a, al[sig])
            br = bracket(v, w)
            for k in range(p):
                rhs = 0
                for tau in range(p):
                    if c(tau, rho, sig):
                        rhs = rhs + al[tau][k] * c(tau, rho, sig)
                if br[k] != rhs:
                    return CheckResult(False, ("fields", rho, sig, k), {"residual": str(br[k] - rhs)})
    return CheckResult(True)


# ---------------------------------------------------------------- gauge calculus
def curvature(A, c: StructureConstants, xs: Sequence[str]):
    """``F[i][j][tau]`` for a potential ``A[i][tau]``."""
    n, p = len(xs), c.dim
    F = [[[0] * p for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for tau in range(p):
                v = _d(A[j][tau], xs[i]) - _d(A[i][tau], xs[j])
                for rho in range(p):
                    for sig in range(p):
                        k = c(tau, rho, sig)
                        if k and A[i][rho] and A[j][sig]:
                            v = v - A[i][rho] * A[j][sig] * k
                F[i][j][tau] = v
    return F


def nabla(A, c: StructureConstants, lam: dict, r: int, xs: Sequence[str]) -> dict:
    """Covariant exterior derivative of an algebra-valued r-form.

    ``lam`` maps increasing index tuples of length r to length-p component lists;
    the result maps increasing (r+1)-tuples to component lists.
    """
    n, p = len(xs), c.dim
    if r >= n:
        raise ValueError("form degree overflow")
    out = {J: [0] * p for J in wedge_basis(n, r + 1)}
    for I, comps in lam.items():
        cov = []
        for i in range(n):
            row = []
            for tau in range(p):
                v = _d(comps[tau], xs[i])
                for rho in range(p):
                    for sig in range(p):
                        k = c(tau, rho, sig)
                        if k and A[i][rho] and comps[sig]:
                            v = v - A[i][rho] * comps[sig] * k
                row.append(v)
            cov.append(row)
        for i in range(n):
            ins = wedge_insert(i, tuple(I))
            if ins is None:
                continue
            sign, J = ins
            # dx^I ^ dx^i = (-1)^r dx^i ^ dx^I, cancelling the (-1)^r of the rule
            for tau in range(p):
                if cov[i][tau]:
                    out[J][tau] = out[J][tau] + cov[i][tau] * sign
    return out


def zero_form(lam: Sequence) -> dict:
    return {(): list(lam)}


def two_form_from_F(F, n: int, p: int) -> dict:
    return {(i, j): [F[i][j][t] for t in range(p)] for i, j in wedge_basis(n, 2)}


def poincare_el(A, c: StructureConstants, script_a, xs: Sequence[str]) -> list:
    """``d_i Acal^i_tau + c^sigma_{rho tau} A^rho_i Acal^i_sigma`` for ``script_a[i][tau]``."""
    n, p = len(xs), c.dim
    out = []
    for tau in range(p):
        v = 0
        for i in range(n):
            v = v + _d(script_a[i][tau], xs[i])
            for rho in range(p):
                for sig in range(p):
                    k = c(sig, rho, tau)
                    if k and A[i][rho] and script_a[i][sig]:
                        v = v + A[i][rho] * script_a[i][sig] * k
        out.append(v)
    return out


def el_duality_residual(A, c: StructureConstants, lam, script_a, xs: Sequence[str]):
    """``sum (nabla lam).Acal + sum lam.EL(Acal) - d_i(lam.Acal^i)``; zero when EL is the adjoint."""
    n, p = len(xs), c.dim
    grad = nabla(A, c, zero_form(lam), 0, xs)
    el = poincare_el(A, c, script_a, xs)
    total = 0
    for i in range(n):
        for tau in range(p):
            total = total + grad[(i,)][tau] * script_a[i][tau]
    for tau in range(p):
        total = total + lam[tau] * el[tau]
    for i in range(n):
        flux = 0
        for tau in range(p):
            flux = flux + lam[tau] * script_a[i][tau]
        total = total - _d(flux, xs[i])
    return total


def linearized_curvature(A, dA, c: StructureConstants, xs: Sequence[str]):
    """t-coefficient of F(A + t dA): d(dA) - c(A_i dA_j + dA_i A_j)."""
    n, p = len(xs), c.dim
    F = [[[0] * p for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for tau in range(p):
                v = _d(dA[j][tau], xs[i]) - _d(dA[i][tau], xs[j])
                for rho in range(p):
                    for sig in range(p):
                        k = c(tau, rho, sig)
                        if k:
                            v = v - (A[i][rho] * dA[j][sig] + dA[i][rho] * A[j][sig]) * k
                F[i][j][tau] = v
    return F


def flat_potential(forms: MCForms, b: Sequence, xs: Sequence[str]):
    """``A^tau_i = -omega^tau_sigma(b(x)) d_i b^sigma(x)`` for a map ``x -> b(x)`` into the group."""
    p = len(forms.coords)
    sub = {forms.coords[s]: b[s] for s in range(p)}
    om = [[_subs(forms.omega[t][s], sub) for s in range(p)] for t in range(p)]
    A = []
    for x in xs:
        row = []
        for t in range(p):
            v = 0
            for s in range(p):
                db = _d(b[s], x)
                if db:
                    v = v - om[t][s] * db
            row.append(v)
        A.append(row)
    return A


def _subs(expr, mapping):
    if isinstance(expr, (int, Fraction)):
        return expr
    return expr.subs({k: v for k, v in mapping.items() if k in expr.gens})


# ------------------------------------------------------------- worked examples
def affine_group() -> tuple[list[VectorField], MCForms]:
    """Generators d_x, x d_x and the invariant forms of y = a2 x + a1 (coordinates a1, a2)."""
    x = ("x",)
    X = Poly.var(x, 0)
    gens = [VectorField(x, [1]), VectorField(x, [X])]
    a = ("a1", "a2")
    a1, a2 = Poly.gens_of(a)
    one = Poly.const(a, 1)
    zero = Poly.const(a, 0)
    omega = (
        (RatFunc(one), RatFunc(-a1, a2)),
        (RatFunc(zero), RatFunc(one, a2)),
    )
    alpha = ((RatFunc(one), RatFunc(zero)), (RatFunc(a1), RatFunc(a2)))
    return gens, MCForms(a, omega, alpha)


def projective_line_generators() -> list[VectorField]:
    x = ("x",)
    X = Poly.var(x, 0)
    return [VectorField(x, [1]), VectorField(x, [X]), VectorField(x, [X * X * Fraction(1, 2)])]
