"""Jet spaces, symbols, prolongation and the Spencer delta-complex.

Linear systems are constant-coefficient subspaces R_q of J_q(E), given by
defining rows over the jet coordinates y^k_mu, |mu| <= q. Coordinates are
ordered graded-lex in mu, then by unknown index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

from .symbolic import multiindex as mi
from .symbolic.linalg import ExactMatrix, rref


class NotStabilized(Exception):
    pass


# ------------------------------------------------------------------- dims
@dataclass(frozen=True)
class JetDims:
    n: int
    m: int
    q: int

    @property
    def sym(self) -> int:
        return self.m * mi.sym_dim(self.n, self.q)

    @property
    def jet(self) -> int:
        return self.m * mi.jet_dim(self.n, self.q)


def jet_dim_table(n: int, m: int, q_max: int) -> list[tuple[int, int, int]]:
    """Rows (q, dim S_q T* (x) E, dim J_q(E))."""
    if q_max < 0:
        raise ValueError("q_max must be non-negative")
    return [(q, JetDims(n, m, q).sym, JetDims(n, m, q).jet) for q in range(q_max + 1)]


def jet_coords(n: int, m: int, q: int) -> list[tuple[int, tuple]]:
    return [(k, mu) for mu in mi.up_to(n, q) for k in range(m)]


def sym_coords(n: int, m: int, q: int) -> list[tuple[int, tuple]]:
    return [(k, mu) for mu in mi.of_order(n, q) for k in range(m)]


# ---------------------------------------------------------------- systems
@dataclass(frozen=True)
class LinearSystem:
    """R_q = {y in J_q(E) : row . y = 0 for every defining row}.

    Each row is a dict (k, mu) -> rational coefficient.
    """

    n: int
    m: int
    q: int
    rows: tuple = ()

    def __post_init__(self):
        for row in self.rows:
            for (k, mu) in row:
                if not (0 <= k < self.m) or len(mu) != self.n or sum(mu) > self.q:
                    raise ValueError(f"jet coordinate {(k, mu)} outside J_{self.q}")

    @classmethod
    def from_rows(cls, n: int, m: int, q: int, rows) -> "LinearSystem":
        clean = tuple({key: c for key, c in r.items() if c} for r in rows)
        return cls(n, m, q, tuple(r for r in clean if r))

    @classmethod
    def from_operator(cls, P, q: int | None = None) -> "LinearSystem":
        """Constant-coefficient LinDiffOp rows read on jets."""
        if not P.is_constant():
            raise ValueError("only constant coefficients are supported")
        q = P.order if q is None else q
        rows = [{(k, mu): c for (k, mu), c in P.row(a).items()} for a in range(P.m_out)]
        return cls.from_rows(P.n, P.m_in, q, rows)

    @property
    def coords(self) -> list:
        return jet_coords(self.n, self.m, self.q)

    def matrix(self) -> ExactMatrix:
        cols = {key: j for j, key in enumerate(self.coords)}
        data = []
        for row in self.rows:
            v = [0] * len(cols)
            for key, c in row.items():
                v[cols[key]] = c
            data.append(v)
        return ExactMatrix(data, len(cols))

    @property
    def rank(self) -> int:
        return self.matrix().rank() if self.rows else 0

    @property
    def dim(self) -> int:
        return mi.jet_dim(self.n, self.q) * self.m - self.rank

    def solutions(self) -> list[list]:
        """Basis of R_q as vectors over jet_coords."""
        N = len(self.coords)
        if not self.rows:
            return [[1 if i == j else 0 for j in range(N)] for i in range(N)]
        return self.matrix().kernel()

    def projected_dim(self, q_low: int) -> int:
        """dim of the image of R_q in J_{q_low}(E)."""
        keep = [j for j, (_, mu) in enumerate(self.coords) if sum(mu) <= q_low]
        sols = self.solutions()
        if not sols:
            return 0
        return ExactMatrix([[v[j] for j in keep] for v in sols], len(keep)).rank()


def _diff_row(row: dict, i: int) -> dict:
    return {(k, mi.add_unit(mu, i)): c for (k, mu), c in row.items()}


def prolong(sys: LinearSystem, r: int = 1) -> LinearSystem:
    """R_{q+r}: all formal derivatives of order <= r of the defining rows."""
    if r < 0:
        raise ValueError("r must be non-negative")
    rows = list(sys.rows)
    frontier = list(sys.rows)
    for _ in range(r):
        new = []
        seen = set()
        for row in frontier:
            for i in range(sys.n):
                d = _diff_row(row, i)
                key = tuple(sorted(d.items()))
                if key not in seen:
                    seen.add(key)
                    new.append(d)
        rows.extend(new)
        frontier = new
    return LinearSystem(sys.n, sys.m, sys.q + r, tuple(rows))


# ----------------------------------------------------------------- symbols
@dataclass(frozen=True)
class SymbolSpace:
    """g_q inside S_q T* (x) E, basis rows over sym_coords(n, m, q)."""

    n: int
    m: int
    q: int
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def coords(self) -> list:
        return sym_coords(self.n, self.m, self.q)

    @classmethod
    def full(cls, n: int, m: int, q: int) -> "SymbolSpace":
        N = m * mi.sym_dim(n, q)
        return cls(n, m, q, tuple(tuple(1 if i == j else 0 for j in range(N)) for i in range(N)))

    def contains(self, v: Sequence) -> bool:
        if not self.basis:
            return not any(v)
        M = ExactMatrix([list(b) for b in self.basis], len(v))
        return ExactMatrix([list(b) for b in self.basis] + [list(v)], len(v)).rank() == M.rank()


def symbol(sys: LinearSystem) -> SymbolSpace:
    """Top-order homogeneous part g_q of R_q."""
    top = sym_coords(sys.n, sys.m, sys.q)
    if sys.q < 0:
        return SymbolSpace(sys.n, sys.m, sys.q, ())
    idx = {key: j for j, key in enumerate(top)}
    data = []
    for row in sys.rows:
        v = [0] * len(top)
        for key, c in row.items():
            if key in idx:
                v[idx[key]] = c
        if any(v):
            data.append(v)
    if not data:
        return SymbolSpace.full(sys.n, sys.m, sys.q)
    ker = ExactMatrix(data, len(top)).kernel()
    basis = rref(ker, len(top)) if ker else []
    return SymbolSpace(sys.n, sys.m, sys.q, tuple(tuple(v) for v in basis))


# ----------------------------------------------------------------- delta map
def form_coords(n: int, m: int, q: int, r: int) -> list:
    """Coordinates (I, k, mu) of wedge^r T* (x) S_q T* (x) E."""
    return [(I, k, mu) for I in mi.wedge_basis(n, r) for mu in mi.of_order(n, q) for k in range(m)]


@dataclass(frozen=True)
class DeltaMap:
    """delta: wedge^r (x) S_{q+1} (x) E -> wedge^{r+1} (x) S_q (x) E."""

    n: int
    m: int
    q: int
    r: int

    @property
    def source(self) -> list:
        return form_coords(self.n, self.m, self.q + 1, self.r)

    @property
    def target(self) -> list:
        return form_coords(self.n, self.m, self.q, self.r + 1) if self.q >= 0 else []

    def image(self, v: dict) -> dict:
        """(delta w)^k_{mu} = dx^i wedge w^k_{mu + 1_i}, on sparse dicts."""
        out: dict = {}
        for (I, k, nu), c in v.items():
            for i in range(self.n):
                if not nu[i]:
                    continue
                ins = mi.wedge_insert(i, I)
                if ins is None:
                    continue
                sign, J = ins
                key = (J, k, mi.add_unit(nu, i, -1))
                out[key] = out.get(key, 0) + sign * c
        return {k: c for k, c in out.items() if c}

    def matrix(self) -> ExactMatrix:
        """Columns are images of source basis vectors (rows = target coords)."""
        tgt = {key: j for j, key in enumerate(self.target)}
        cols = []
        for key in self.source:
            col = [0] * len(tgt)
            for t, c in self.image({key: 1}).items():
                col[tgt[t]] = c
            cols.append(col)
        return ExactMatrix(cols, len(tgt)).transpose() if cols else ExactMatrix([], 0)


def _wedge_tensor(n: int, r: int, g: SymbolSpace) -> list[dict]:
    """Basis of wedge^r T* (x) g as sparse dicts over form_coords."""
    out = []
    coords = g.coords
    for I in mi.wedge_basis(n, r):
        for b in g.basis:
            out.append({(I, k, mu): c for (k, mu), c in zip(coords, b) if c})
    return out


def _rank_of(vectors: list[dict], coords: list) -> int:
    if not vectors:
        return 0
    idx = {key: j for j, key in enumerate(coords)}
    data = []
    for v in vectors:
        row = [0] * len(coords)
        for key, c in v.items():
            row[idx[key]] = c
        data.append(row)
    return ExactMatrix(data, len(coords)).rank()


def delta_rank(n: int, r: int, g_next: SymbolSpace) -> int:
    """rank of delta on wedge^r (x) g_{q+1}."""
    if r < 0 or r > n:
        return 0
    d = DeltaMap(n, g_next.m, g_next.q - 1, r)
    images = [d.image(v) for v in _wedge_tensor(n, r, g_next)]
    return _rank_of(images, d.target)


def delta_cohomology(g: SymbolSpace, g_next: SymbolSpace, r: int) -> int:
    """dim H^r of the delta-sequence at wedge^r (x) g_q."""
    n = g.n
    if not 0 <= r <= n:
        raise ValueError("form degree out of range")
    src = _wedge_tensor(n, r, g)
    if g.q >= 1 and r < n:
        rk = delta_rank(n, r, g)
    else:
        rk = 0
    kernel_dim = len(src) - rk
    incoming = delta_rank(n, r - 1, g_next) if r >= 1 else 0
    return kernel_dim - incoming


def delta_cocycles(g: SymbolSpace, r: int) -> int:
    """dim Z^r(g_q) = dim ker(delta on wedge^r (x) g_q)."""
    src = _wedge_tensor(g.n, r, g)
    rk = delta_rank(g.n, r, g) if g.q >= 1 and r < g.n else 0
    return len(src) - rk


# ----------------------------------------------------------- diagram dims
@dataclass
class DiagramDims:
    q: int
    spencer: list = field(default_factory=list)
    middle: list = field(default_factory=list)
    janet: list = field(default_factory=list)

    def columns_exact(self) -> bool:
        return all(c + f == e for c, f, e in zip(self.spencer, self.janet, self.middle))


def certify_integrable(sys: LinearSystem, extra: int = 3) -> bool:
    """Dimension stabilization plus surjective projections for `extra` steps."""
    prev = sys
    for _ in range(extra):
        nxt = prolong(prev, 1)
        if nxt.projected_dim(prev.q) != prev.dim:
            return False
        if nxt.dim != prev.dim and symbol(nxt).dim == 0:
            return False
        prev = nxt
    return True


def spencer_janet_dims(sys: LinearSystem, check: bool = True) -> DiagramDims:
    """dims of C_r, C_r(E) and F_r, r = 0..n, at the order of `sys`."""
    n, m, q = sys.n, sys.m, sys.q
    if check and not certify_integrable(sys):
        raise NotStabilized(f"projections fail to be onto starting at order {q}")
    nxt = prolong(sys, 1)
    if check and nxt.projected_dim(q) != sys.dim:
        raise NotStabilized("R_{q+1} does not project onto R_q")
    g_next = symbol(nxt)
    s_next = SymbolSpace.full(n, m, q + 1)
    jq = m * mi.jet_dim(n, q)
    sols = sys.solutions()
    jcoords = sys.coords
    out = DiagramDims(q)
    for r in range(n + 1):
        w = comb(n, r)
        c_r = w * sys.dim - delta_rank(n, r - 1, g_next)
        c_e = w * jq - delta_rank(n, r - 1, s_next)
        # F_r directly: wedge^r (x) J_q modulo (wedge^r (x) R_q + delta image)
        coords = [(I, k, mu) for I in mi.wedge_basis(n, r) for (k, mu) in jcoords]
        vecs = []
        for I in mi.wedge_basis(n, r):
            for v in sols:
                vecs.append({(I, k, mu): c for (k, mu), c in zip(jcoords, v) if c})
        if r >= 1:
            d = DeltaMap(n, m, q, r - 1)
            vecs.extend(d.image(v) for v in _wedge_tensor(n, r - 1, s_next))
        f_r = len(coords) - _rank_of([v for v in vecs if v], coords)
        out.spencer.append(c_r)
        out.middle.append(c_e)
        out.janet.append(f_r)
    return out


def euler_poincare(dims: Sequence[int]) -> int:
    """Alternating sum d0 - d1 + d2 - ..."""
    return sum((-1) ** i * d for i, d in enumerate(dims))


# ------------------------------------------------------------ Macaulay
def macaulay_system() -> LinearSystem:
    """y_33 = 0, y_23 - y_11 = 0, y_22 = 0 (n = 3, m = 1)."""
    return LinearSystem.from_rows(3, 1, 2, [
        {(0, (0, 0, 2)): 1},
        {(0, (0, 1, 1)): 1, (0, (2, 0, 0)): -1},
        {(0, (0, 2, 0)): 1},
    ])


def macaulay_operator():
    from .diffop import LinDiffOp
    xs = ("x1", "x2", "x3")
    return LinDiffOp(xs, 1, 3, {
        (0, 0, (0, 0, 2)): 1,
        (1, 0, (0, 1, 1)): 1, (1, 0, (2, 0, 0)): -1,
        (2, 0, (0, 2, 0)): 1,
    }, ["y"], ["u", "v", "w"])


def system_from_jets(n: int, m: int, q: int, relations: Sequence[dict]) -> LinearSystem:
    """Convenience alias accepting Fraction/int coefficient dicts."""
    return LinearSystem.from_rows(n, m, q, [{k: Fraction(c) for k, c in r.items()} for r in relations])
