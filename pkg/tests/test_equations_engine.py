import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetspencer import equations_engine as ee
from jetspencer.diffop import apply, compose, describe
from jetspencer.lie_structure import jacobi_check, structure_constants
from jetspencer.symbolic import Poly, parse_poly


# ------------------------------------------------------------ generators
@pytest.mark.parametrize("kind,n,count", [
    ("killing", 2, 3), ("killing", 3, 6), ("weyl", 2, 4), ("weyl", 3, 7),
    ("projective", 1, 3), ("conformal", 2, 6), ("conformal", 3, 10), ("conformal", 4, 15)])
def test_generator_counts(kind, n, count):
    r = ee.check_generators(ee.build_group_system(kind, n=n))
    assert r["closed"] and r["jacobi"]
    assert r["count"] == r["expected"] == count
    assert r["dim_Rq"] == r["dim_Rq1"] == count


def test_generator_count_formula():
    assert [ee.generator_count("conformal", n) for n in (2, 3, 4, 5)] == [6, 10, 15, 21]


def test_weyl_plane_labels():
    gs = ee.build_group_system("weyl", n=2)
    assert gs.gen_labels == ["t1", "t2", "r12", "d"]
    assert jacobi_check(structure_constants(gs.generators)).ok


@pytest.mark.parametrize("n", [2, 3, 4])
def test_elation_divergence(n):
    metric = ee.ConstantMetric.euclidean(n)
    x = Poly.gens_of(tuple(f"x{i + 1}" for i in range(n)))
    for s, theta in enumerate(ee.elation_generators(metric)):
        div = sum((theta[r].diff(r) for r in range(n)), Poly.const(x[0].gens, 0))
        assert div == n * sum((x[t] * metric.omega[s][t] for t in range(n)), Poly.const(x[0].gens, 0))


# ------------------------------------------------------------ jet matrix
def test_projective_jet_matrix():
    M = ee.jet_matrix(ee.build_group_system("projective", n=1))
    x = Poly.var(("x1",), 0)
    half = parse_poly("1/2*x1^2", ("x1",))
    assert M == [[1, x, half], [0, 1, x], [0, 0, 1]]
    assert ee.matrix_det(M) == 1


@pytest.mark.parametrize("kind,n", [("killing", 2), ("weyl", 2), ("conformal", 2), ("conformal", 3)])
def test_jet_matrix_invertible(kind, n):
    assert ee.matrix_det(ee.jet_matrix(ee.build_group_system(kind, n=n))) != 0


# ------------------------------------------------------------ Spencer d
def test_killing_plane_d1():
    gs = ee.build_group_system("killing", n=2)
    assert describe(ee.spencer_d1(gs)).splitlines() == [
        "D1[xi1]: d1 xi1", "D2[xi1]: d2 xi1 + rho12",
        "D1[xi2]: d1 xi2 - rho12", "D2[xi2]: d2 xi2",
        "D1[rho12]: d1 rho12", "D2[rho12]: d2 rho12"]


def test_killing_plane_d2():
    gs = ee.build_group_system("killing", n=2)
    d1 = ee.spencer_d1(gs)
    d2 = ee.spencer_d2(gs, d1)
    assert describe(d2).splitlines() == [
        "C1: d2 D1[xi1] - d1 D2[xi1] + D1[rho12]",
        "C2: d2 D1[xi2] - d1 D2[xi2] + D2[rho12]",
        "C3: d2 D1[rho12] - d1 D2[rho12]"]
    assert compose(d2, d1).is_zero()


def test_projective_line_d1():
    gs = ee.build_group_system("projective", n=1)
    assert describe(ee.spencer_d1(gs)).splitlines() == [
        "D1[xi1]: d1 xi1 - A", "D1[A]: d1 A - A1", "D1[A1]: d1 A1"]


@pytest.mark.parametrize("kind,n", [("weyl", 2), ("conformal", 2), ("killing", 3)])
def test_d2_after_d1_vanishes(kind, n):
    gs = ee.build_group_system(kind, n=n)
    d1 = ee.spencer_d1(gs)
    assert compose(ee.spencer_d2(gs, d1), d1).is_zero()


def test_conformal_plane_d2_rows():
    d2 = ee.spencer_d2(ee.build_group_system("conformal", n=2))
    assert (d2.m_out, d2.order) == (6, 1)


# ----------------------------------------------------------- equilibrium
def test_weyl_plane_duals():
    gs = ee.build_group_system("weyl", n=2)
    assert ee.dual_labels(gs) == [
        "sigma1,1", "sigma1,2", "sigma2,1", "sigma2,2", "mu12,1", "mu12,2", "nu1", "nu2"]
    eq = ee.equilibrium(gs)
    assert eq.families == ["Cauchy", "Cauchy", "Cosserat", "Clausius"]
    assert eq.rhs == ["f1", "f2", "m12", "u"]


def test_projective_line_fluxes():
    gs = ee.build_group_system("projective", n=1)
    forms = ee.divergence_certificate(gs)
    assert [f.flux_text(gs, 0) for f in forms] == [
        "(1)*sigma1,1",
        "(x1)*sigma1,1 + (1)*nu1",
        "(1/2*x1^2)*sigma1,1 + (x1)*nu1 + (1)*pi1,1"]
    assert all(f.ok for f in forms)


def test_weyl_plane_rotation_flux():
    gs = ee.build_group_system("weyl", n=2)
    r12 = ee.divergence_certificate(gs)[2]
    assert r12.label == "r12"
    assert r12.flux_text(gs, 0) == "(-x2)*sigma1,1 + (x1)*sigma2,1 + (1)*mu12,1"
    assert r12.flux_text(gs, 1) == "(-x2)*sigma1,2 + (x1)*sigma2,2 + (1)*mu12,2"


@pytest.mark.parametrize("kind,n", [("killing", 2), ("weyl", 2), ("conformal", 2), ("killing", 3)])
def test_certificates_hold(kind, n):
    assert all(f.ok for f in ee.divergence_certificate(ee.build_group_system(kind, n=n)))


def test_wrong_weights_rejected():
    gs = ee.build_group_system("projective", n=1)
    M = ee.jet_matrix(gs)
    bad = [[M[0][0], M[0][1] * 2, M[0][2]], M[1], M[2]]
    with pytest.raises(ee.CertificateFailed):
        ee.divergence_certificate(gs, M=bad)
    assert not ee.divergence_certificate(gs, M=bad, strict=False)[1].ok


@pytest.mark.parametrize("kind,n", [("projective", 1), ("weyl", 2)])
def test_synthesized_flux_matches_jet_matrix(kind, n):
    gs = ee.build_group_system(kind, n=n)
    given_forms = ee.divergence_certificate(gs)
    for tau in range(gs.p):
        f = ee.synthesize_flux(gs, tau)
        assert f.ok
        assert f.flux == given_forms[tau].flux


# ---------------------------------------------------------- parametrize
def test_killing_plane_parametrization():
    p = ee.parametrize(ee.build_group_system("killing", n=2))
    assert p.zero_check and p.potentials == 3
    assert describe(p.op).splitlines() == [
        "sigma1,1: -d2 phi1", "sigma1,2: d1 phi1",
        "sigma2,1: -d2 phi2", "sigma2,2: d1 phi2",
        "mu12,1: -d2 phi3 + phi1", "mu12,2: d1 phi3 + phi2"]


def test_potential_counts():
    assert [ee.potential_count("killing", n) for n in (2, 3, 4)] == [3, 18, 60]
    assert ee.potential_count("conformal", 4) == 90
    with pytest.raises(ValueError):
        ee.potential_count("weyl", 2)


def test_airy_quadratic():
    xs = ("x1", "x2")
    assert apply(ee.airy_parametrization(), [parse_poly("1/2*x1^2", xs)]) == [0, 1, 0]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_airy_is_equilibrated(seed):
    rng = random.Random(seed)
    xs = ("x1", "x2")
    phi = Poly(xs, {(a, b): rng.randint(-4, 4) for a in range(5) for b in range(5 - a)})
    sigma = apply(ee.airy_parametrization(), [phi])
    assert all(v == 0 for v in apply(ee.cauchy_operator(), sigma))


# -------------------------------------------------------------- Maxwell
def test_maxwell_block_n4():
    r = ee.maxwell_block(4)
    assert r.conservation and r.trace_zero and r.trace_formula
    assert r.adjoint_rows[0].splitlines()[1] == "J1: -d2 F12 - d3 F13 - d4 F14 + B1"


def test_maxwell_trace_nonzero_off_four():
    r = ee.maxwell_block(3)
    assert not r.trace_zero and r.trace_formula


# ------------------------------------------------- dilatation projection
def test_projection_example():
    xs = ("x1", "x2", "x3", "x4")
    x = Poly.gens_of(xs)
    z = Poly.const(xs, 0)
    r = ee.dilatation_projection(z, [x[1], z, z, z], 4)
    assert r.B[0] == x[1] * -4
    assert r.F[0][1] == 4
    assert r.formula_ok and r.bianchi_ok


def test_projection_of_pure_gauge_vanishes():
    xs = ("x1", "x2", "x3")
    A = parse_poly("x1^2*x2 - x3", xs)
    r = ee.dilatation_projection(A, [A.diff(i) for i in range(3)])
    assert all(v == 0 for v in r.B)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_projection_formula_random(seed):
    rng = random.Random(seed)
    xs = ("x1", "x2", "x3")
    rp = lambda: Poly(xs, {(a, b, c): rng.randint(-3, 3) for a in range(3) for b in range(3) for c in range(3)
                           if a + b + c <= 2})
    r = ee.dilatation_projection(rp(), [rp() for _ in range(3)])
    assert r.formula_ok and r.bianchi_ok


@pytest.mark.parametrize("n", [2, 3])
def test_reduction_identities(n):
    r = ee.reduction_identities(n)
    assert r["first"] and r["second"] and r["parametric_form"] and r["operator_form"]
