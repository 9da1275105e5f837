"""Multi-indices for partial derivatives and jet coordinates."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Iterator

MultiIndex = tuple


def zero(n: int) -> MultiIndex:
    return (0,) * n


def unit(n: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(n))


def add_unit(mu: MultiIndex, i: int, k: int = 1) -> MultiIndex:
    """Return mu + k*1_i."""
    if not 0 <= i < len(mu):
        raise IndexError(f"variable index {i} out of range for length {len(mu)}")
    return mu[:i] + (mu[i] + k,) + mu[i + 1:]


def add(mu: MultiIndex, nu: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(mu, nu))


def sub(mu: MultiIndex, nu: MultiIndex) -> MultiIndex:
    out = tuple(a - b for a, b in zip(mu, nu))
    if any(c < 0 for c in out):
        raise ValueError(f"{nu} is not below {mu}")
    return out


def order(mu: MultiIndex) -> int:
    return sum(mu)


def leq(nu: MultiIndex, mu: MultiIndex) -> bool:
    return all(a <= b for a, b in zip(nu, mu))


def binom(mu: MultiIndex, nu: MultiIndex) -> int:
    out = 1
    for a, b in zip(mu, nu):
        out *= comb(a, b)
    return out


def mfactorial(mu: MultiIndex) -> int:
    out = 1
    for a in mu:
        out *= factorial(a)
    return out


def first_nonzero(mu: MultiIndex) -> int:
    """Smallest i with mu_i > 0 (class of the multi-index)."""
    for i, a in enumerate(mu):
        if a:
            return i
    raise ValueError("zero multi-index has no class")


@lru_cache(maxsize=None)
def of_order(n: int, q: int) -> tuple:
    """All multi-indices of length n and order exactly q, in decreasing lex order.

    For n = 2, q = 2 this gives (2,0), (1,1), (0,2).
    """
    if n == 0:
        return ((),) if q == 0 else ()
    out = []
    for a in range(q, -1, -1):
        for rest in of_order(n - 1, q - a):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def up_to(n: int, q: int) -> tuple:
    """All multi-indices of order <= q, graded (order ascending), lex inside each degree."""
    out = []
    for d in range(q + 1):
        out.extend(of_order(n, d))
    return tuple(out)


def below(mu: MultiIndex) -> Iterator[MultiIndex]:
    """Every nu <= mu componentwise."""
    if not mu:
        yield ()
        return
    for a in range(mu[0] + 1):
        for rest in below(mu[1:]):
            yield (a,) + rest


def to_indices(mu: MultiIndex) -> tuple:
    """Expand (2,0,1) into the sorted index list (0,0,2)."""
    out = []
    for i, a in enumerate(mu):
        out.extend([i] * a)
    return tuple(out)


def from_indices(n: int, idx) -> MultiIndex:
    mu = [0] * n
    for i in idx:
        mu[i] += 1
    return tuple(mu)


def sym_dim(n: int, q: int) -> int:
    """dim S_q T* for dim T = n."""
    if q < 0:
        return 0
    return comb(q + n - 1, q)


def jet_dim(n: int, q: int) -> int:
    """dim J_q for a rank one bundle over an n-dimensional base."""
    if q < 0:
        return 0
    return comb(q + n, q)


def wedge_basis(n: int, r: int) -> tuple:
    """Increasing index tuples spanning the r-th exterior power."""
    return tuple(combinations(range(n), r))


def wedge_insert(i: int, I: tuple) -> tuple[int, tuple] | None:
    """dx^i wedge dx^I as (sign, sorted J), or None when i already in I."""
    if i in I:
        return None
    pos = sum(1 for j in I if j < i)
    J = I[:pos] + (i,) + I[pos:]
    return (-1) ** pos, J
