"""Primal cones, recession rays, and dimension dichotomies.

Homogenizing AX <= b with a fresh sign-constrained variable z (column -b,
right-hand sides zeroed) gives the primal cone.  For bounded inputs the cone
is reduced to the origin exactly when the input is unsolvable, and a cone
point with z > 0 dehomogenizes to a primal solution; those two facts drive
both the test suite and the solvability pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Constraint,
    LincertError,
    LinearExpr,
    Point,
    Provenance,
    Relation,
    RelationError,
    RowClass,
    System,
    ZERO,
    is_zero_row,
    validate_standard_shape,
)
from .fourier import feasibility


@dataclass(frozen=True)
class PrimalCone:
    system: System
    z_index: int
    row_origin: tuple[tuple[int, int], ...]  # (cone row id, primal main row id)


class NonHomogeneousError(LincertError):
    pass


def _fresh_name(taken, base="z"):
    if base not in taken:
        return base
    i = 0
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def primal_cone(primal: System) -> PrimalCone:
    mains, _ = validate_standard_shape(primal)
    zname = _fresh_name(primal.variables)
    variables = primal.variables + (zname,)
    z = len(primal.variables)
    rows = []
    origin = []
    cid = 0
    for row in mains:
        terms = dict(row.expr.terms)
        if row.rhs != 0:
            terms[z] = -row.rhs
        rows.append(Constraint(cid, LinearExpr.from_terms(terms), Relation.LE, ZERO, Provenance.main()))
        origin.append((cid, row.cid))
        cid += 1
    for v in range(len(variables)):
        rows.append(Constraint(cid, LinearExpr.from_terms({v: -1}), Relation.LE, ZERO, Provenance.sign()))
        cid += 1
    return PrimalCone(System(variables, tuple(rows), is_cone=True), z, tuple(origin))


def recession_system(system: System) -> System:
    """Zero the right-hand sides and relax strict rows; sign rows unchanged."""
    rows = []
    for c in system.constraints:
        if c.relation is Relation.EQ:
            raise RelationError(f"constraint {c.cid} is an equality; expand it first")
        if c.provenance.kind == "sign":
            rows.append(c)
        else:
            rows.append(Constraint(c.cid, c.expr, Relation.LE, ZERO, c.provenance))
    return system.with_rows(rows)


def has_solution_at_infinity(system: System) -> tuple[bool, Point | None]:
    """Search the recession cone for a nonzero ray, one coordinate probe at a
    time (x_j >= 1, and x_j <= -1 when x_j carries no sign row)."""
    recession = recession_system(system)
    signed = {v for v in range(len(system.variables)) if recession.sign_row_for(v) is not None}
    cid = recession.next_id()
    for v in range(len(system.variables)):
        probes = [LinearExpr.from_terms({v: -1})]
        if v not in signed:
            probes.append(LinearExpr.from_terms({v: 1}))
        for expr in probes:
            probe_row = Constraint(cid, expr, Relation.LE, ZERO - 1, Provenance.main())
            verdict = feasibility(recession.with_rows(recession.constraints + (probe_row,)), order="greedy")
            if verdict.feasible:
                return True, verdict.witness
    return False, None


def is_bounded(system: System) -> bool:
    """Bounded means no solutions at infinity (trivial recession cone)."""
    return not has_solution_at_infinity(system)[0]


def is_reduced_to_origin(cone: System) -> bool:
    """For a homogeneous, fully sign-constrained system: is the origin the
    only point?  Under x >= 0 the single probe sum(x) >= 1 decides it."""
    unsigned = []
    for c in cone.constraints:
        if c.rhs != 0:
            raise NonHomogeneousError(f"constraint {c.cid} has nonzero right side {c.rhs}")
    for v in range(len(cone.variables)):
        if cone.sign_row_for(v) is None:
            unsigned.append(cone.variables[v])
    if unsigned:
        raise LincertError("variables without sign rows: " + ", ".join(unsigned))
    if not cone.variables:
        return True
    probe = Constraint(
        cone.next_id(),
        LinearExpr.from_terms({v: -1 for v in range(len(cone.variables))}),
        Relation.LE,
        ZERO - 1,
        Provenance.main(),
    )
    return not feasibility(cone.with_rows(cone.constraints + (probe,)), order="greedy").feasible


def strictened(system: System) -> System:
    """Every informative <= row becomes <; tautology rows stay as they are."""
    rows = []
    for c in system.constraints:
        if c.relation is Relation.EQ:
            raise RelationError(f"constraint {c.cid} is an equality; expand it first")
        if c.relation is Relation.LE and is_zero_row(c) is not RowClass.TAUTOLOGY:
            rows.append(Constraint(c.cid, c.expr, Relation.LT, c.rhs, c.provenance))
        else:
            rows.append(c)
    return system.with_rows(rows)


def is_full_dimensional(system: System) -> bool:
    """Feasibility of the all-strict variant: an interior point exists."""
    return feasibility(strictened(system), order="greedy").feasible


def dehomogenize(cone: PrimalCone, point: Point) -> Point:
    """Divide a cone point with z > 0 back into primal coordinates."""
    z = point.value(cone.z_index)
    if z <= 0:
        raise LincertError("cone point has no positive homogenizing coordinate")
    return Point.of({v: point.value(v) / z for v in range(cone.z_index)})
