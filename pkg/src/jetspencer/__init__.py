"""Exact verification of Lie pseudogroup, Spencer sequence and gauge identities."""
from . import curvature, diffop, equations_engine, jet_theory, lie_structure, nonlinear_jets, symbolic
from .diffop import LinDiffOp, compose, formal_adjoint
from .equations_engine import ConstantMetric, build_group_system
from .symbolic import Poly, parse_poly

__version__ = "0.1.0"

__all__ = [
    "ConstantMetric",
    "LinDiffOp",
    "Poly",
    "build_group_system",
    "compose",
    "curvature",
    "diffop",
    "equations_engine",
    "formal_adjoint",
    "jet_theory",
    "lie_structure",
    "nonlinear_jets",
    "parse_poly",
    "symbolic",
]
