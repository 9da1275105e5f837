import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetspencer import diffop as do
from jetspencer import equations_engine as ee
from jetspencer.diffop import LinDiffOp, apply, compatibility_conditions, compose, formal_adjoint
from jetspencer.jet_theory import macaulay_operator
from jetspencer.symbolic import Poly, RatFunc, parse_poly
from jetspencer.symbolic import multiindex as mi

XS2 = ("x1", "x2")


def rand_poly(xs, rng, deg=2):
    return Poly(xs, {e: Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for e in mi.up_to(len(xs), deg)})


def rand_op(rng, xs=XS2, m_in=2, m_out=2, order=2, coeff_deg=1, density=0.4):
    co = {}
    for a in range(m_out):
        for k in range(m_in):
            for mu in mi.up_to(len(xs), order):
                if rng.random() < density:
                    co[(a, k, mu)] = rand_poly(xs, rng, coeff_deg)
    return LinDiffOp(xs, m_in, m_out, co)


# ------------------------------------------------------------------ apply
def test_killing_rotation():
    x1, x2 = Poly.gens_of(XS2)
    assert all(v == 0 for v in apply(ee.killing_operator(2), [x2, -x1]))


def test_killing_dilatation():
    assert apply(ee.killing_operator(2), list(Poly.gens_of(XS2))) == [2, 2, 0]


def test_macaulay_apply():
    xs = ("x1", "x2", "x3")
    x1, x2, x3 = Poly.gens_of(xs)
    assert apply(macaulay_operator(), [x1 * x2 * x3]) == [0, x1, 0]


def test_apply_shape_mismatch():
    with pytest.raises(ValueError):
        apply(ee.killing_operator(2), [Poly.var(XS2, 0)])


def test_bad_coefficient_key():
    with pytest.raises(ValueError):
        LinDiffOp(XS2, 1, 1, {(0, 1, (1, 0)): 1})


# ---------------------------------------------------------------- compose
def test_riemann_after_killing_vanishes():
    assert compose(ee.riemann_cc_operator(), ee.killing_operator(2)).is_zero()


def test_identity_compose():
    P = rand_op(random.Random(1))
    assert compose(LinDiffOp.identity(XS2, 2), P) == P
    assert compose(P, LinDiffOp.identity(XS2, 2)) == P


def test_cauchy_after_airy_vanishes():
    assert compose(ee.cauchy_operator(), ee.airy_parametrization()).is_zero()


def test_compose_shape_mismatch():
    with pytest.raises(ValueError):
        compose(ee.killing_operator(2), ee.killing_operator(2))


def test_compose_matches_application():
    rng = random.Random(2)
    P, Q = rand_op(rng), rand_op(rng)
    u = [rand_poly(XS2, rng, 4) for _ in range(2)]
    assert apply(compose(Q, P), u) == apply(Q, apply(P, u))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_compose_associative(seed):
    rng = random.Random(seed)
    P, Q, R = (rand_op(rng, order=1) for _ in range(3))
    assert compose(R, compose(Q, P)) == compose(compose(R, Q), P)


# ---------------------------------------------------------------- adjoint
def test_adjoint_of_derivative():
    d = LinDiffOp(("x",), 1, 1, {(0, 0, (1,)): 1})
    assert formal_adjoint(d) == d.scale(-1)


def test_adjoint_with_variable_coefficient():
    x = Poly.var(("x",), 0)
    P = LinDiffOp(("x",), 1, 1, {(0, 0, (1,)): x})
    # ad(x d) v = -d(x v) = -x v' - v
    assert formal_adjoint(P) == LinDiffOp(("x",), 1, 1, {(0, 0, (1,)): -x, (0, 0, (0,)): -1})


def test_adjoint_projective_triangle():
    gs = ee.build_group_system("projective", n=1)
    assert ee.equilibrium(gs).report() == [
        "Cauchy: d1 sigma1,1 = f1",
        "Clausius: d1 nu1 + sigma1,1 = u",
        "Maxwell/Weyl: d1 pi1,1 + nu1 = v1",
    ]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_adjoint_involution(seed):
    rng = random.Random(seed)
    P = rand_op(rng, m_in=rng.randint(1, 3), m_out=rng.randint(1, 3), order=3, coeff_deg=2, density=0.2)
    assert formal_adjoint(formal_adjoint(P)) == P


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_duality_certificate(seed):
    rng = random.Random(seed)
    P = rand_op(rng, order=2, coeff_deg=2)
    adP, cert = do.adjoint_with_certificate(P)
    assert adP == formal_adjoint(P)
    assert cert.verify()


def test_duality_on_functions():
    """v.(Pu) - (ad(P)v).u is a divergence: its integral over a box with u, v vanishing on the boundary is 0."""
    rng = random.Random(3)
    P = rand_op(rng, order=2, coeff_deg=1)
    adP = formal_adjoint(P)
    x1, x2 = Poly.gens_of(XS2)
    bump = x1 * x1 * (x1 - 1) ** 2 * x2 * x2 * (x2 - 1) ** 2
    u = [bump * rand_poly(XS2, rng, 1) for _ in range(2)]
    v = [bump * rand_poly(XS2, rng, 1) for _ in range(2)]
    Pu, av = apply(P, u), apply(adP, v)
    density = sum((v[a] * Pu[a] for a in range(2)), Poly.const(XS2, 0)) - \
        sum((av[k] * u[k] for k in range(2)), Poly.const(XS2, 0))

    def integrate(p):
        # integral over [0, 1]^2 of each monomial x1^a x2^b is 1/((a+1)(b+1))
        return sum(c * Fraction(1, (e[0] + 1) * (e[1] + 1)) for e, c in p.terms.items())
    assert integrate(density) == 0


# --------------------------------------------------------------------- CC
def test_killing_cc_is_riemann():
    cc = compatibility_conditions(ee.killing_operator(2), 2)
    assert cc.orders == [2]
    assert do.describe(cc.operator) == "c1: d22 Omega11 + d11 Omega22 - 2*d12 Omega12"


def test_gradient_cc_is_curl():
    grad = LinDiffOp(XS2, 1, 2, {(0, 0, (1, 0)): 1, (1, 0, (0, 1)): 1}, ["u"], ["u1", "u2"])
    cc = compatibility_conditions(grad, 1)
    assert cc.orders == [1]
    row = cc.operator.row(0)
    assert set(row) == {(0, (0, 1)), (1, (1, 0))}
    assert row[(0, (0, 1))] == -row[(1, (1, 0))]


def test_macaulay_cc():
    P = macaulay_operator()
    cc = compatibility_conditions(P, 2)
    assert cc.orders == [2, 2, 2]
    assert compose(cc.operator, P).is_zero()


def test_cc_empty_at_bound():
    grad = LinDiffOp(("x",), 1, 1, {(0, 0, (1,)): 1})
    assert compatibility_conditions(grad, 2).empty
    with pytest.raises(do.EmptyAtBound):
        compatibility_conditions(grad, 2, raise_empty=True)


def test_cc_bound_must_be_positive():
    with pytest.raises(ValueError):
        compatibility_conditions(ee.killing_operator(2), 0)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000))
def test_cc_annihilates(seed):
    rng = random.Random(seed)
    P = rand_op(rng, m_in=1, m_out=3, order=1, coeff_deg=0, density=0.5)
    cc = compatibility_conditions(P, 1)
    assert compose(cc.operator, P).is_zero()


# ------------------------------------------------------------- text form
def test_text_round_trip():
    x1, x2 = Poly.gens_of(XS2)
    P = LinDiffOp(XS2, 2, 1, {(0, 0, (1, 0)): RatFunc(x1, x2 + 1), (0, 1, (0, 2)): Fraction(-3, 2)})
    text = do.to_text(P)
    Q = do.from_text(text)
    assert Q == P
    assert do.to_text(Q) == text


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_text_round_trip_random(seed):
    P = rand_op(random.Random(seed), order=3)
    assert do.to_text(do.from_text(do.to_text(P))) == do.to_text(P)
    assert do.from_text(do.to_text(P)) == P


def test_describe_row():
    assert do.describe(ee.airy_parametrization()).splitlines() == [
        "sigma11: d22 phi", "sigma22: d11 phi", "sigma12: -d12 phi"]


def test_order_and_constant():
    P = ee.killing_operator(3)
    assert P.order == 1 and P.is_constant()
    x = parse_poly("x1", XS2)
    assert not LinDiffOp(XS2, 1, 1, {(0, 0, (0, 0)): x}).is_constant()
