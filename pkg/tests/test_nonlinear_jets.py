import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetspencer import nonlinear_jets as nl
from jetspencer.symbolic import Poly, RatFunc

XS2 = ("x1", "x2")


def pt(*v):
    return tuple(Fraction(a) for a in v)


# --------------------------------------------------------------- groupoid
def test_inverse_on_the_line():
    # f(x) = 2x + x^2 at 0: (f^-1)' = 1/2, (f^-1)'' = -f''/f'^3 = -1/4
    f = nl.JetOfMap(1, 2, pt(0), {(0, (0,)): Fraction(0), (0, (1,)): Fraction(2), (0, (2,)): Fraction(2)})
    inv = nl.jet_invert(f)
    assert inv.comps == {(0, (0,)): 0, (0, (1,)): Fraction(1, 2), (0, (2,)): Fraction(-1, 4)}


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([(1, 3), (2, 3), (3, 2)]))
def test_groupoid_laws(seed, nq):
    n, q = nq
    rng = random.Random(seed)
    try:
        f = nl.random_point_jet(n, q, rng)
        g = nl.random_point_jet(n, q, rng, point=f.target)
        h = nl.random_point_jet(n, q, rng, point=g.target)
        fi = nl.jet_invert(f)
    except nl.SingularJet:
        return
    assert nl.jet_compose(h, nl.jet_compose(g, f)).equals(nl.jet_compose(nl.jet_compose(h, g), f))
    assert nl.jet_compose(fi, f).equals(nl.identity_jet(n, q, f.source))
    assert nl.jet_compose(f, fi).equals(nl.identity_jet(n, q, f.target))
    assert nl.jet_invert(fi).equals(f)


def test_singular_jet_rejected():
    f = nl.JetOfMap(1, 1, pt(0), {(0, (0,)): Fraction(0), (0, (1,)): Fraction(0)})
    with pytest.raises(nl.SingularJet):
        nl.jet_invert(f)


def test_compose_order_mismatch():
    f = nl.identity_jet(2, 2, pt(0, 0))
    g = nl.identity_jet(2, 3, pt(0, 0))
    with pytest.raises(nl.OrderMismatch):
        nl.jet_compose(g, f)
    with pytest.raises(nl.OrderMismatch):
        f.truncate(3)


# -------------------------------------------------------------------- chi
def _holonomic_maps():
    x1, x2 = Poly.gens_of(XS2)
    return [x1 + x1 * x2 + x2 * x2 * Fraction(1, 3), x2 + x1 * x1 - x1 * x2 * 2]


@pytest.mark.parametrize("point", [pt(0, 0), pt(Fraction(1, 2), Fraction(-1, 3))])
def test_chi_vanishes_on_holonomic_jets(point):
    ctx = nl.JetContext(2, 2)
    J = nl.JetField.holonomic(_holonomic_maps(), 3).at(ctx, point)
    assert nl.nonlinear_spencer(J, ctx).values().is_zero()


def test_chi_line_example():
    # f = x + x^2 with its first derivative replaced by 1 + 3x
    x = Poly.var(("x1",), 0)
    fx = Poly(("x1",), {(0,): 1, (1,): 3})
    f = nl.JetField(("x1",), 1, {(0, (0,)): x + x * x, (0, (1,)): fx})
    ctx = nl.JetContext(1, 1, symbols=("x1",))
    chi = nl.nonlinear_spencer(f.at(ctx), ctx).values()
    assert chi[0, (0,), 0] == RatFunc(1 + x * 2, fx) - 1


def test_chi_needs_order_one():
    ctx = nl.JetContext(1, 1)
    F = nl.identity_jet(1, 0, pt(0))
    with pytest.raises(nl.OrderMismatch):
        nl.nonlinear_spencer(F, ctx)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000))
def test_chi_routes_agree(seed):
    rng = random.Random(seed)
    ctx = nl.JetContext(2, 2)
    try:
        J = nl.random_field(XS2, 3, rng).at(ctx, pt(Fraction(1, 3), Fraction(1, 2))).truncate(2)
        chi = nl.nonlinear_spencer(J, ctx)
    except nl.SingularJet:
        return
    assert nl.chi_low_order(J, ctx).values() == chi.values().truncate(1)
    assert nl.spencer_by_composition(J, ctx) == chi.values()
    assert all(nl._is_zero(nl._at0(v)) for v in nl.inductive_residuals(chi, J, ctx))


def test_first_compatibility_identity_generic():
    depth = {0: 2, 1: 2, 2: 1}
    ctx = nl.JetContext(2, 2, symbols=nl.generic_symbols(2, 2, depth))
    F = nl.generic_jet(ctx, 2, depth)
    first, _ = nl.compatibility_residuals(nl.nonlinear_spencer(F, ctx), ctx)
    assert first and all(v == 0 for v in first)


# ------------------------------------------------------------------ gauge
@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10_000))
def test_gauge_transform_matches_composite(seed):
    rng = random.Random(seed)
    ctx = nl.JetContext(2, 2)
    f, g = nl.random_field(XS2, 2, rng), nl.random_field(XS2, 2, rng)
    try:
        F = f.at(ctx, pt(Fraction(1, 2), Fraction(1, 3)))
        y0 = tuple(nl._at0(v) for v in F.target)
        chi = nl.nonlinear_spencer(g.at(ctx, y0), ctx).values()
        lhs = nl.gauge_transform_chi(chi, F, ctx).values()
        rhs = nl.nonlinear_spencer(nl.compose_fields(g, F, ctx), ctx).values()
    except nl.SingularJet:
        return
    assert lhs == rhs


def test_gauge_cocycle():
    rng = random.Random(5)
    ctx = nl.JetContext(2, 2)
    f, h, g = (nl.random_field(XS2, 2, rng) for _ in range(3))
    H = h.at(ctx, pt(Fraction(1, 3), Fraction(-1, 2)))
    F = f.at(ctx, tuple(nl._at0(v) for v in H.target))
    y0 = tuple(nl._at0(v) for v in F.target)
    chi = nl.nonlinear_spencer(g.at(ctx, y0), ctx).values().map_values(lambda v: v + Fraction(1, 3))
    lhs = nl.gauge_transform_chi(nl.gauge_transform_chi(chi, F, ctx).values(), H, ctx).values()
    rhs = nl.gauge_transform_chi(chi, nl.compose_fields(f, H, ctx), ctx).values()
    assert lhs == rhs


def test_gauge_order_mismatch():
    ctx = nl.JetContext(1, 1)
    chi = nl.ChiForm(1, 1, {})
    with pytest.raises(nl.OrderMismatch):
        nl.gauge_transform_chi(chi, nl.identity_jet(1, 1, pt(0)), ctx)


# -------------------------------------------------------------- variation
@pytest.mark.parametrize("q", [0, 1])
@pytest.mark.parametrize("mode", ["source", "target"])
def test_variation_pointwise(q, mode):
    rng = random.Random(1)
    f = nl.random_field(XS2, q + 2, rng)
    xi = nl.random_field(XS2, q + 1, rng, near_identity=False)
    r = nl.variation_check(f, xi, q, mode=mode, point=pt(Fraction(1, 2), Fraction(1, 3)))
    assert r.agree


def test_variation_polynomial_mode_line():
    rng = random.Random(3)
    f = nl.random_field(("x1",), 2, rng, degree=1)
    xi = nl.random_field(("x1",), 1, rng, degree=1, near_identity=False)
    assert nl.variation_check(f, xi, 0).agree


def test_variation_identity_limit_is_linear():
    rng = random.Random(4)
    xi = nl.random_field(XS2, 1, rng, near_identity=False)
    p = pt(Fraction(1, 3), Fraction(2, 3))
    r = nl.variation_check(nl.JetField.identity(XS2, 2), xi, 0, point=p)
    ctx = nl.JetContext(2, 2)
    assert r.agree
    assert r.results["perturb-source"] == nl.linear_spencer(xi.at(ctx, p), ctx, 0).values()


def test_variation_errors():
    rng = random.Random(0)
    f = nl.random_field(XS2, 4, rng)
    xi = nl.random_field(XS2, 3, rng, near_identity=False)
    with pytest.raises(nl.UnsupportedOrder):
        nl.variation_check(f, xi, 2)
    with pytest.raises(nl.OrderMismatch):
        nl.variation_check(nl.random_field(XS2, 1, rng), xi, 0)
    with pytest.raises(ValueError):
        nl.variation_check(f, xi, 0, mode="sideways")
