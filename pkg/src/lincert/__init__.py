"""Exact-rational linear inequality analysis with machine-checkable
certificates: Fourier elimination, elementary duality, implicit equalities,
primal cones, Gaussian multiplier transfer, and a bounded-solvability
decision loop with a differential-testing harness."""

__version__ = "0.1.0"

from .core import (
    Constraint,
    LincertError,
    LinearExpr,
    MultiplierVector,
    Point,
    Provenance,
    Rational,
    Relation,
    System,
    check_multiplier_certificate,
    combine,
    evaluate,
    expand_equalities,
    is_zero_row,
    make_system,
    rat,
)
from .fourier import FeasibilityVerdict, eliminate_var, farkas_from_trace, feasibility, project
from .sysfile import parse, print_system

__all__ = [
    "Constraint",
    "FeasibilityVerdict",
    "LincertError",
    "LinearExpr",
    "MultiplierVector",
    "Point",
    "Provenance",
    "Rational",
    "Relation",
    "System",
    "check_multiplier_certificate",
    "combine",
    "eliminate_var",
    "evaluate",
    "expand_equalities",
    "farkas_from_trace",
    "feasibility",
    "is_zero_row",
    "make_system",
    "parse",
    "print_system",
    "project",
    "rat",
]
