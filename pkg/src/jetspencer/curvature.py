"""Algebraic curvature tensors over a constant metric: Riemann = Ricci + Weyl.

Tensors are dense nested lists indexed R[k][l][i][j] for R^k_{l,ij}. Index
symmetries are checked on construction, never imposed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .equations_engine import ConstantMetric, build_group_system
from .jet_theory import DeltaMap, SymbolSpace, delta_cocycles, delta_cohomology, prolong, symbol
from .symbolic import multiindex as mi
from .symbolic.linalg import ExactMatrix


class SymmetryError(ValueError):
    pass


def _zeros4(n):
    return [[[[Fraction(0)] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]


def _delta(a, b):
    return 1 if a == b else 0


@dataclass(frozen=True)
class RicciTensor:
    components: tuple

    def __post_init__(self):
        c = tuple(tuple(Fraction(v) for v in row) for row in self.components)
        n = len(c)
        if any(c[i][j] != c[j][i] for i in range(n) for j in range(n)):
            raise SymmetryError("Ricci tensor must be symmetric")
        object.__setattr__(self, "components", c)

    @property
    def n(self) -> int:
        return len(self.components)

    def trace(self, metric: ConstantMetric) -> Fraction:
        inv = metric.inverse
        return sum(inv[i][j] * self.components[i][j] for i in range(self.n) for j in range(self.n))


@dataclass(frozen=True)
class RiemannTensor:
    components: tuple

    def __post_init__(self):
        c = tuple(tuple(tuple(tuple(Fraction(v) for v in a) for a in b) for b in row) for row in self.components)
        n = len(c)
        for k in range(n):
            for l in range(n):
                for i in range(n):
                    for j in range(n):
                        if c[k][l][i][j] != -c[k][l][j][i]:
                            raise SymmetryError("curvature must be skew in its form indices")
        object.__setattr__(self, "components", c)

    @property
    def n(self) -> int:
        return len(self.components)

    def __getitem__(self, idx):
        k, l, i, j = idx
        return self.components[k][l][i][j]

    def __add__(self, other: "RiemannTensor") -> "RiemannTensor":
        n = self.n
        return RiemannTensor([[[[self[k, l, i, j] + other[k, l, i, j] for j in range(n)] for i in range(n)]
                               for l in range(n)] for k in range(n)])

    def __sub__(self, other: "RiemannTensor") -> "RiemannTensor":
        n = self.n
        return RiemannTensor([[[[self[k, l, i, j] - other[k, l, i, j] for j in range(n)] for i in range(n)]
                               for l in range(n)] for k in range(n)])

    def is_zero(self) -> bool:
        n = self.n
        return all(self[k, l, i, j] == 0 for k in range(n) for l in range(n) for i in range(n) for j in range(n))

    def contract(self) -> RicciTensor:
        """R_ij = R^r_{i,rj}."""
        n = self.n
        return RicciTensor([[sum(self[r, i, r, j] for r in range(n)) for j in range(n)] for i in range(n)])

    def trace_matrix(self) -> list:
        n = self.n
        return [[sum(self[r, i, r, j] for r in range(n)) for j in range(n)] for i in range(n)]

    def bianchi_defect(self) -> list:
        """Cyclic sums R^k_{l,ij} + R^k_{i,jl} + R^k_{j,li} that must vanish."""
        n = self.n
        out = []
        for k in range(n):
            for l in range(n):
                for i in range(n):
                    for j in range(n):
                        s = self[k, l, i, j] + self[k, i, j, l] + self[k, j, l, i]
                        if s:
                            out.append(((k, l, i, j), s))
        return out

    def in_g1(self, metric: ConstantMetric) -> bool:
        """omega_kr R^r_{l,ij} skew in (k, l)."""
        n, om = self.n, metric.omega
        low = [[[[sum(om[k][r] * self[r, l, i, j] for r in range(n)) for j in range(n)] for i in range(n)]
                for l in range(n)] for k in range(n)]
        return all(low[k][l][i][j] == -low[l][k][i][j] for k in range(n) for l in range(n)
                   for i in range(n) for j in range(n))

    def is_algebraic(self, metric: ConstantMetric) -> bool:
        return self.in_g1(metric) and not self.bianchi_defect()


@dataclass(frozen=True)
class WeylTensor:
    tensor: RiemannTensor

    def trace_free(self) -> bool:
        return all(v == 0 for row in self.tensor.trace_matrix() for v in row)


def _check_dim(n: int):
    if n < 3:
        raise ValueError("the splitting formulas divide by n - 2 and need n >= 3")


def ricci_from_A(A: Sequence[Sequence], metric: ConstantMetric) -> tuple[RicciTensor, Fraction]:
    """R_ij = (n - 2) A_ij + omega_ij tr(A); returns (R, tr R)."""
    n = metric.n
    _check_dim(n)
    inv, om = metric.inverse, metric.omega
    trA = sum(inv[i][j] * Fraction(A[i][j]) for i in range(n) for j in range(n))
    R = RicciTensor([[(n - 2) * Fraction(A[i][j]) + om[i][j] * trA for j in range(n)] for i in range(n)])
    return R, R.trace(metric)


def A_from_ricci(R: RicciTensor, metric: ConstantMetric) -> list:
    n = metric.n
    _check_dim(n)
    tr = R.trace(metric)
    om = metric.omega
    return [[R.components[i][j] / (n - 2) - om[i][j] * tr / (2 * (n - 1) * (n - 2)) for j in range(n)]
            for i in range(n)]


def riemann_from_ricci(R: RicciTensor, metric: ConstantMetric) -> RiemannTensor:
    n = metric.n
    _check_dim(n)
    om, inv = metric.omega, metric.inverse
    Rc = R.components
    tr = R.trace(metric)
    a = Fraction(1, n - 2)
    b = Fraction(1, (n - 1) * (n - 2))
    out = _zeros4(n)
    for k in range(n):
        for l in range(n):
            for i in range(n):
                for j in range(n):
                    s = _delta(k, i) * Rc[l][j] - _delta(k, j) * Rc[l][i]
                    s -= sum(inv[k][t] * (om[l][i] * Rc[t][j] - om[l][j] * Rc[t][i]) for t in range(n))
                    v = a * s - b * (_delta(k, i) * om[l][j] - _delta(k, j) * om[l][i]) * tr
                    out[k][l][i][j] = v
    return RiemannTensor(out)


def weyl_projection(T: RiemannTensor, metric: ConstantMetric) -> WeylTensor:
    _check_dim(metric.n)
    return WeylTensor(T - riemann_from_ricci(T.contract(), metric))


# ---------------------------------------------------------- dimensions
@dataclass(frozen=True)
class BundleDims:
    n: int
    F1: int
    F1_hat: int

    @property
    def difference(self) -> int:
        return self.F1 - self.F1_hat

    @property
    def difference_ok(self) -> bool:
        return self.difference == self.n * (self.n + 1) // 2


def bundle_dims(n: int) -> BundleDims:
    """Closed forms n^2(n^2-1)/12 and n(n+1)(n+2)(n-3)/12."""
    _check_dim(n)
    return BundleDims(n, n * n * (n * n - 1) // 12, n * (n + 1) * (n + 2) * (n - 3) // 12)


def _symbols(kind: str, n: int):
    gs = build_group_system(kind, n=n)
    rows = gs.lie_equations.rows
    # first order equations only; the symbol of their prolongation is g_2
    from .jet_theory import LinearSystem
    first = LinearSystem(n, n, 1, tuple(r for r in rows if max(sum(mu) for (_, mu) in r) == 1))
    return symbol(first), symbol(prolong(first, 1))


def computed_bundle_dims(n: int) -> BundleDims:
    """F1 = H^2(g_1) for Killing and F1_hat = H^2 for conformal, by exact ranks."""
    g1, g2 = _symbols("killing", n)
    h1, h2 = _symbols("conformal", n)
    return BundleDims(n, delta_cohomology(g1, g2, 2), delta_cohomology(h1, h2, 2))


def curvature_basis(metric: ConstantMetric) -> list[RiemannTensor]:
    """Basis of Z^2(g_1): kernel of delta on wedge^2 (x) g_1."""
    n = metric.n
    g1, _ = _symbols_for(metric)
    coords = g1.coords
    wedge = mi.wedge_basis(n, 2)
    vecs = []
    for I in wedge:
        for b in g1.basis:
            vecs.append({(I, k, mu): c for (k, mu), c in zip(coords, b) if c})
    d = DeltaMap(n, n, 0, 2)
    tgt = {key: j for j, key in enumerate(d.target)}
    # columns: images of the wedge^2 (x) g_1 basis; kernel gives coefficient vectors
    mat = [[0] * len(vecs) for _ in tgt]
    for c, v in enumerate(vecs):
        for key, val in d.image(v).items():
            mat[tgt[key]][c] = val
    ker = ExactMatrix(mat, len(vecs)).kernel() if tgt else [[1 if i == j else 0 for j in range(len(vecs))]
                                                            for i in range(len(vecs))]
    out = []
    for coeffs in ker:
        T = _zeros4(n)
        for c, v in zip(coeffs, vecs):
            if not c:
                continue
            for (I, k, mu), val in v.items():
                i, j = I
                l = mi.first_nonzero(mu)
                T[k][l][i][j] += c * val
                T[k][l][j][i] -= c * val
        out.append(RiemannTensor(T))
    return out


def _symbols_for(metric: ConstantMetric):
    from .jet_theory import LinearSystem
    from .equations_engine import medolaghi_rows
    rows, _, _ = medolaghi_rows("killing", metric)
    n = metric.n
    first = LinearSystem(n, n, 1, tuple(rows))
    return symbol(first), symbol(prolong(first, 1))


def random_curvature(metric: ConstantMetric, rng: random.Random, basis: list | None = None) -> RiemannTensor:
    basis = basis or curvature_basis(metric)
    n = metric.n
    T = _zeros4(n)
    for B in basis:
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if not c:
            continue
        for k in range(n):
            for l in range(n):
                for i in range(n):
                    for j in range(n):
                        T[k][l][i][j] += c * B[k, l, i, j]
    return RiemannTensor(T)


def splitting_holds(T: RiemannTensor, metric: ConstantMetric) -> bool:
    lift = riemann_from_ricci(T.contract(), metric)
    W = weyl_projection(T, metric)
    return (lift + W.tensor - T).is_zero()


def z2_dimension(n: int) -> int:
    g1, _ = _symbols("killing", n)
    return delta_cocycles(g1, 2)
