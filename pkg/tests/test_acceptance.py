"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Each criterion runs the registered verification cases that cover it, plus a
few direct checks.  A ``discrepancy-documented`` case counts as passing: the
computed object is correct and a misprint in the reference display is noted.
"""
import json

from jetspencer import cli
from jetspencer import curvature as cv
from jetspencer import equations_engine as ee
from jetspencer import jet_theory as jt


def verdict(num, title, ids, **direct):
    reports = [cli.run_case(i) for i in ids]
    failed = [r for r in reports if r.status == cli.FAIL]
    bad_direct = [k for k, v in direct.items() if not v]
    ok = not failed and not bad_direct
    print(f"{'PASS' if ok else 'FAIL'} criterion {num}: {title}")
    for r in reports:
        print(f"    {r.status:<22} {r.id}")
    for k in direct:
        print(f"    {'pass' if direct[k] else 'fail':<22} {k}")
    msg = "; ".join([f"{r.id}: {json.dumps(cli._jsonable(r.witness))}" for r in failed] + bad_direct)
    assert ok, msg


def test_maurer_cartan_affine():
    verdict(1, "Maurer-Cartan equations of the affine group", ["mc-affine"])


def test_structure_constants_and_counts():
    counts = {}
    for n in range(1, 5):
        counts[f"killing n={n}"] = ee.check_generators(ee.build_group_system("killing", n=n))["count"] == n * (n + 1) // 2
        counts[f"weyl n={n}"] = ee.check_generators(ee.build_group_system("weyl", n=n))["count"] == (n * n + n + 2) // 2
        counts[f"conformal n={n}"] = \
            ee.check_generators(ee.build_group_system("conformal", n=n))["count"] == (n + 1) * (n + 2) // 2
    counts["conformal n=4 has 15"] = ee.generator_count("conformal", 4) == 15
    verdict(2, "closure, Jacobi and parameter counts", ["structure-constants"], **counts)


def test_gauge_identities():
    verdict(3, "nabla o nabla = c F lambda and Euler-Lagrange adjointness",
            ["nabla-curvature", "nabla-flat", "poincare-el-adjoint"])


def test_jet_matrices():
    dets = {f"det {k}": ee.matrix_det(ee.jet_matrix(ee.build_group_system(k, n=n))) == 1
            for k, n in (("projective", 1), ("weyl", 2), ("conformal", 2))}
    verdict(4, "3x3, 4x4 and 6x6 jet matrices",
            ["jet-matrix-projective", "jet-matrix-weyl2", "jet-matrix-conformal2"], **dets)


def test_adjoint_spencer_equations():
    rows = ee.equilibrium(ee.build_group_system("conformal", n=2)).report()
    verdict(5, "adjoint of D1 gives the equilibrium rows",
            ["equilibrium-projective", "equilibrium-weyl2", "equilibrium-conformal2"],
            elation_rows=rows[4:] == ["Maxwell/Weyl: d1 pi1,1 + d2 pi1,2 + mu12,2 + nu1 = v1",
                                      "Maxwell/Weyl: d1 pi2,1 + d2 pi2,2 - mu12,1 + nu2 = v2"])


def test_divergence_certificates():
    verdict(6, "pure divergence identities",
            ["divergence-projective", "divergence-weyl2", "divergence-conformal2", "divergence-elation-n3"])


def test_parametrizations():
    counts = {}
    for n in (2, 3, 4):
        for kind, formula in (("killing", n * n * (n * n - 1) // 4), ("conformal", n * (n * n - 1) * (n + 2) // 4)):
            p = ee.build_group_system(kind, n=n).p
            counts[f"{kind} n={n}"] = ee.potential_count(kind, n) == formula == n * (n - 1) // 2 * p
    verdict(7, "parametrizations, Airy and potential counts",
            ["parametrization-killing2", "airy", "adjoint-sequence", "potential-counts"], **counts)


def test_macaulay_suite():
    verdict(8, "Macaulay example",
            ["macaulay-r2", "macaulay-symbols", "macaulay-dims", "macaulay-cc", "macaulay-syzygy",
             "macaulay-euler-poincare"],
            f3=jt.spencer_janet_dims(jt.prolong(jt.macaulay_system(), 2)).janet[3] == 12)


def test_conformal_plane_diagram():
    verdict(9, "conformal n=2 diagram dimensions", ["conformal2-diagram"],
            euler_poincare=12 - 30 + 20 - 2 == 0)


def test_curvature_suite():
    dims = {f"n={n}": cv.bundle_dims(n).difference_ok for n in (4, 5, 6)}
    d4 = cv.computed_bundle_dims(4)
    verdict(10, "Ricci trace, Weyl projection, splitting and bundle dimensions",
            ["curvature-trace", "curvature-splitting", "curvature-dims", "weyl-n3"],
            computed_n4=(d4.F1, d4.F1_hat) == (20, 10), **dims)


def test_maxwell_block():
    r = ee.maxwell_block(4)
    verdict(11, "current conservation and traceless stress", ["maxwell-block"],
            conservation=r.conservation, trace=r.trace_zero)


def test_dilatation_projection_chain():
    verdict(12, "B = n(dA - A_i), F = dB, dF = 0", ["projection-chain"])


def test_nonlinear_suite():
    verdict(13, "jet groupoid, nonlinear Spencer operator, gauge law and variations",
            ["nl-groupoid", "nl-holonomic", "nl-chi-routes", "nl-compatibility", "nl-gauge", "nl-cocycle",
             "nl-variation-q0", "nl-variation-q1"])


def test_reduction_identities():
    direct = {f"n={n}": all(v for k, v in ee.reduction_identities(n).items() if k != "n") for n in (2, 3, 4)}
    verdict(14, "reduction identities under the parametric substitution", ["reduction-identities"], **direct)
