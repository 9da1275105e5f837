from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetspencer import jet_theory as jt
from jetspencer.equations_engine import build_group_system, medolaghi_rows, ConstantMetric
from jetspencer.symbolic import ExactMatrix


def first_order(kind, n):
    rows, _, _ = medolaghi_rows(kind, ConstantMetric.euclidean(n))
    return jt.LinearSystem(n, n, 1, tuple(r for r in rows if max(sum(mu) for (_, mu) in r) == 1))


# ------------------------------------------------------------- dim table
def test_jet_table_n3():
    table = jt.jet_dim_table(3, 1, 7)
    assert [s for _, s, _ in table] == [1, 3, 6, 10, 15, 21, 28, 36]
    assert [j for _, _, j in table] == [1, 4, 10, 20, 35, 56, 84, 120]


def test_jet_table_n1():
    table = jt.jet_dim_table(1, 1, 5)
    assert all(s == 1 and j == q + 1 for q, s, j in table)


def test_jet_table_n4():
    assert jt.jet_dim_table(4, 1, 2)[2][1] == 10


def test_jet_table_negative():
    with pytest.raises(ValueError):
        jt.jet_dim_table(2, 1, -1)


@given(st.integers(1, 5), st.integers(1, 3), st.integers(0, 6))
def test_jet_dims_closed_form(n, m, q):
    d = jt.JetDims(n, m, q)
    assert d.sym == m * comb(q + n - 1, q)
    assert d.jet == m * comb(q + n, q)


# ----------------------------------------------------------- prolongation
def test_macaulay_prolongation():
    R2 = jt.macaulay_system()
    dims = [jt.prolong(R2, r).dim for r in range(5)]
    # 10 - 3 at order two, then 8 from order three on
    assert dims == [7, 8, 8, 8, 8]


def test_macaulay_projection_onto():
    R2 = jt.macaulay_system()
    R3 = jt.prolong(R2, 1)
    assert R3.projected_dim(2) == R2.dim
    assert jt.certify_integrable(R2)
    assert jt.certify_integrable(R3)


def _hidden_condition():
    # y1_1 = y2, y1_2 = 0, y2_2 = y1: cross derivatives force y1 = 0
    return jt.LinearSystem.from_rows(2, 2, 1, [
        {(0, (1, 0)): 1, (1, (0, 0)): -1},
        {(0, (0, 1)): 1},
        {(1, (0, 1)): 1, (0, (0, 0)): -1},
    ])


def test_projection_not_onto():
    R1 = _hidden_condition()
    assert R1.dim == 3
    assert jt.prolong(R1, 1).projected_dim(1) == 2
    assert not jt.certify_integrable(R1)


def test_killing_prolongation():
    R1 = first_order("killing", 2)
    assert R1.dim == 3
    assert jt.prolong(R1, 1).dim == 3
    assert jt.symbol(jt.prolong(R1, 1)).dim == 0


def test_conformal_plane_order_three():
    gs = build_group_system("conformal", n=2)
    assert gs.prolonged.dim == 6
    assert jt.symbol(gs.prolonged).dim == 0


@pytest.mark.parametrize("n", [3, 4])
def test_conformal_symbols(n):
    R1 = first_order("conformal", n)
    assert jt.symbol(jt.prolong(R1, 1)).dim == n
    assert jt.symbol(jt.prolong(R1, 2)).dim == 0


def test_killing_symbol_g2_zero():
    for n in (2, 3, 4):
        assert jt.symbol(jt.prolong(first_order("killing", n), 1)).dim == 0


def test_prolong_stabilizes():
    R = jt.prolong(jt.macaulay_system(), 1)
    dims = [jt.prolong(R, r).dim for r in range(4)]
    assert len(set(dims)) == 1


def test_coordinate_out_of_range():
    with pytest.raises(ValueError):
        jt.LinearSystem(2, 1, 1, ({(0, (2, 0)): 1},))


# ----------------------------------------------------------------- symbol
def test_macaulay_symbols():
    R2 = jt.macaulay_system()
    assert [jt.symbol(jt.prolong(R2, r)).dim for r in range(3)] == [3, 1, 0]


def test_macaulay_symbol_kernel_from_matrix():
    g2 = jt.symbol(jt.macaulay_system())
    assert len(g2.basis) == 3
    # y_111 is the only parametric jet of order three, with y_123 = y_111
    g3 = jt.symbol(jt.prolong(jt.macaulay_system(), 1))
    (b,) = g3.basis
    support = {key[1]: c for key, c in zip(g3.coords, b) if c}
    assert set(support) == {(3, 0, 0), (1, 1, 1)}
    assert support[(3, 0, 0)] == support[(1, 1, 1)]


# ------------------------------------------------------------------ delta
@pytest.mark.parametrize("n,m,q", [(2, 1, 2), (3, 1, 2), (3, 2, 1), (4, 1, 2)])
def test_delta_squared_zero(n, m, q):
    for r in range(n - 1):
        d1 = jt.DeltaMap(n, m, q + 1, r)
        d2 = jt.DeltaMap(n, m, q, r + 1)
        M1, M2 = d1.matrix(), d2.matrix()
        prod = [[sum(M2.rows[i][k] * M1.rows[k][j] for k in range(M1.nrows)) for j in range(M1.ncols)]
                for i in range(M2.nrows)]
        assert all(v == 0 for row in prod for v in row)


def test_full_symbol_h0_is_zero():
    # delta from degree -1 is zero; on a full symbol H^0 = ker(delta) = 0 for q >= 1
    g = jt.SymbolSpace.full(2, 1, 2)
    assert jt.delta_cohomology(g, jt.SymbolSpace.full(2, 1, 3), 0) == 0


def test_delta_cohomology_weyl_bundles():
    for n, (f1, f1_hat) in {4: (20, 10), 5: (50, 35)}.items():
        g1 = jt.symbol(first_order("killing", n))
        g2 = jt.symbol(jt.prolong(first_order("killing", n), 1))
        h1 = jt.symbol(first_order("conformal", n))
        h2 = jt.symbol(jt.prolong(first_order("conformal", n), 1))
        assert jt.delta_cohomology(g1, g2, 2) == f1
        assert jt.delta_cohomology(h1, h2, 2) == f1_hat
        assert f1 - f1_hat == n * (n + 1) // 2


def test_macaulay_g2_not_2_acyclic():
    R2 = jt.macaulay_system()
    g2, g3 = jt.symbol(R2), jt.symbol(jt.prolong(R2, 1))
    # recorded value; only non-vanishing is asserted by the theory
    assert jt.delta_cohomology(g2, g3, 2) == 3


def test_delta_degree_range():
    g = jt.SymbolSpace.full(2, 1, 1)
    with pytest.raises(ValueError):
        jt.delta_cohomology(g, g, 3)


# --------------------------------------------------------------- diagrams
def test_macaulay_diagram():
    d = jt.spencer_janet_dims(jt.prolong(jt.macaulay_system(), 2))
    assert d.spencer == [8, 24, 24, 8]
    assert d.middle == [35, 84, 70, 20]
    assert d.janet == [27, 60, 46, 12]
    assert d.columns_exact()


def test_conformal_plane_diagram():
    d = jt.spencer_janet_dims(build_group_system("conformal", n=2).prolonged)
    assert (d.spencer, d.middle, d.janet) == ([6, 12, 6], [20, 30, 12], [14, 18, 6])
    assert d.columns_exact()


def test_projective_line_diagram():
    d = jt.spencer_janet_dims(build_group_system("projective", n=1).prolonged)
    assert (d.spencer, d.middle) == ([3, 3], [4, 3])
    # exactness of the columns leaves 1, 0 for the Janet row
    assert d.janet == [1, 0]


def test_not_stabilized():
    with pytest.raises(jt.NotStabilized):
        jt.spencer_janet_dims(_hidden_condition())


@settings(max_examples=6, deadline=None)
@given(st.sampled_from([("killing", 2), ("killing", 3), ("weyl", 2), ("conformal", 2), ("conformal", 3)]))
def test_columns_exact(sys_kind):
    kind, n = sys_kind
    gs = build_group_system(kind, n=n)
    d = jt.spencer_janet_dims(gs.prolonged)
    assert d.columns_exact()
    assert jt.euler_poincare(d.spencer) == 0


# ---------------------------------------------------------- Euler-Poincare
def test_euler_poincare_values():
    assert jt.euler_poincare([1, 12, 21, 46, 72, 48, 12]) == 0
    assert jt.euler_poincare([2, 20, 30, 12]) == 0
    assert jt.euler_poincare([8, 120, 540, 600, 184]) == 12


def test_macaulay_f3_dimension():
    d = jt.spencer_janet_dims(jt.prolong(jt.macaulay_system(), 2))
    assert d.janet[3] == 12


def test_matrix_helpers_consistent():
    R = jt.macaulay_system()
    M = R.matrix()
    assert isinstance(M, ExactMatrix)
    assert R.dim == M.ncols - M.rank()
    assert len(R.solutions()) == R.dim
