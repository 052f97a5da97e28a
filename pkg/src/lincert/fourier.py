"""Fourier elimination with replayable traces.

Eliminating a variable pairs each row where it appears positively with each
row where it appears negatively; the pair's positive combination drops the
variable.  Recording the combination coefficients per produced row makes the
procedure self-certifying: an infeasible system eventually produces a row
[0] <= r with r < 0, and replaying the trace turns that row into nonnegative
multipliers over the input rows (a Farkas certificate).  A feasible system
yields an exact witness by back-substitution.

No acceleration (subsumption, redundancy pruning beyond exact duplicates) is
attempted; the point is trust at desk scale, not speed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .core import (
    Constraint,
    LincertError,
    LinearExpr,
    MultiplierVector,
    Point,
    Provenance,
    Relation,
    RelationError,
    RowClass,
    System,
    UnknownConstraintError,
    UnknownVariableError,
    ZERO,
    combine,
    is_zero_row,
)

# One derivation: ((parent_id, coefficient > 0), ...) whose weighted sum is the row.
Derivation = tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class ProducedRow:
    cid: int
    derivations: tuple[Derivation, ...]  # >= 1; extras come from merged duplicates


@dataclass(frozen=True)
class EliminationStep:
    var: int
    produced: tuple[ProducedRow, ...]


@dataclass(frozen=True)
class EliminationTrace:
    input_ids: frozenset[int]
    steps: tuple[EliminationStep, ...] = ()

    def extend(self, step: EliminationStep) -> "EliminationTrace":
        return EliminationTrace(self.input_ids, self.steps + (step,))

    def derivation_map(self) -> dict[int, tuple[Derivation, ...]]:
        out: dict[int, tuple[Derivation, ...]] = {}
        for step in self.steps:
            for row in step.produced:
                out[row.cid] = row.derivations
        return out


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    witness: Point | None = None
    certificate: MultiplierVector | None = None


def _normalize_row(expr: LinearExpr, rhs: Fraction) -> tuple[LinearExpr, Fraction, Fraction]:
    """Scale a row so its entries form a coprime integer vector, sign preserved.

    Returns (expr, rhs, factor) with row_in == factor * row_out.
    """
    entries = [c for _, c in expr.terms]
    if rhs != 0:
        entries.append(rhs)
    if not entries:
        return expr, rhs, Fraction(1)
    g = gcd(*(abs(c.numerator) for c in entries))
    l = lcm(*(c.denominator for c in entries))
    factor = Fraction(g, l)
    return expr.scale(1 / factor), rhs / factor, factor


def normalized_key(constraint: Constraint) -> tuple:
    """Structural row identity up to positive scaling; used for comparisons."""
    expr, rhs, _ = _normalize_row(constraint.expr, constraint.rhs)
    return (expr.terms, constraint.relation, rhs)


def _direction(row: Constraint) -> tuple[tuple, Fraction]:
    """Scaling class of the left side plus the rescaled bound.

    Two rows constrain the same halfspace direction exactly when their keys
    match; comparing the rescaled bounds then decides implication.
    """
    if row.expr.is_zero:
        return (), row.rhs
    expr, _, content = _normalize_row(row.expr, ZERO)
    return expr.terms, row.rhs / content


def _tighter(a: tuple[Fraction, Relation], b: tuple[Fraction, Relation]) -> bool:
    """Does bound a imply bound b along one direction?"""
    if a[0] != b[0]:
        return a[0] < b[0]
    return a[1] is Relation.LT or b[1] is not Relation.LT


def eliminate_var(system: System, var: int, start_id: int | None = None) -> tuple[System, EliminationTrace]:
    """Project the system onto the remaining variables.

    Rows without the variable pass through unchanged (same ids).  Each
    positive/negative pair contributes one derived row, normalized to a
    coprime integer vector.  Rows the step would leave mutually redundant are
    pruned: derived tautologies are dropped, exact duplicates merge (all
    parent combinations kept in the trace), and of several rows with the same
    left-side direction only the tightest survives.  The pruning is
    solution-set-exact and every surviving derived row keeps its full
    derivation, so certificates are unaffected.

    Multi-step drivers pass start_id, a floor for fresh constraint ids, so
    that ids stay unique across a whole elimination chain even when pruning
    shrinks an intermediate system below earlier id ranges.
    """
    if not 0 <= var < len(system.variables):
        raise UnknownVariableError(f"no variable index {var}")
    for c in system.constraints:
        if c.relation is Relation.EQ:
            raise RelationError(f"constraint {c.cid} is an equality; expand it first")

    passthrough = []
    positive = []
    negative = []
    for c in system.constraints:
        a = c.expr.coeff(var)
        if a == 0:
            passthrough.append(c)
        elif a > 0:
            positive.append((c, a))
        else:
            negative.append((c, -a))

    rows = list(passthrough)
    bounds = []  # (rescaled bound, relation) per position in rows
    derivations_of: dict[int, tuple[Derivation, ...]] = {}
    by_key: dict[tuple, int] = {}  # (terms, rel, rhs) -> position in rows
    by_dir: dict[tuple, int] = {}  # direction terms -> position of the tightest row
    for i, c in enumerate(passthrough):
        direction, beta = _direction(c)
        by_key[(c.expr.terms, c.relation, c.rhs)] = i
        bounds.append((beta, c.relation))
        best = by_dir.get(direction)
        if best is None or _tighter(bounds[i], bounds[best]):
            by_dir[direction] = i
    next_id = system.next_id() if start_id is None else max(start_id, system.next_id())
    for pos, a in positive:
        for neg, b in negative:
            coeff_pos = 1 / a
            coeff_neg = 1 / b
            expr = pos.expr.scale(coeff_pos) + neg.expr.scale(coeff_neg)
            rhs = pos.rhs * coeff_pos + neg.rhs * coeff_neg
            expr, rhs, factor = _normalize_row(expr, rhs)
            rel = Relation.LT if Relation.LT in (pos.relation, neg.relation) else Relation.LE
            key = (expr.terms, rel, rhs)
            if expr.is_zero and rel.holds(ZERO, rhs):
                continue  # derived tautology: var-free, never binds, never certifies
            derivation: Derivation = ((pos.cid, coeff_pos / factor), (neg.cid, coeff_neg / factor))
            if key in by_key:
                idx = by_key[key]
                if rows[idx].cid in derivations_of:
                    derivations_of[rows[idx].cid] += (derivation,)
                continue
            row = Constraint(next_id, expr, rel, rhs, Provenance.derived((pos.cid, neg.cid)))
            direction, beta = _direction(row)
            bound = (beta, rel)
            best = by_dir.get(direction)
            if best is not None and _tighter(bounds[best], bound):
                continue  # an existing row in this direction already implies it
            rows.append(row)
            bounds.append(bound)
            derivations_of[next_id] = (derivation,)
            by_key[key] = len(rows) - 1
            if best is None or _tighter(bound, bounds[best]):
                by_dir[direction] = len(rows) - 1
            next_id += 1

    # Keep only the tightest row per direction (ties were resolved above).
    survivors = [row for i, row in enumerate(rows) if by_dir[_direction(row)[0]] == i]
    produced = tuple(
        ProducedRow(row.cid, derivations_of[row.cid])
        for row in survivors
        if row.cid in derivations_of
    )
    new_system = system.with_rows(survivors)
    step = EliminationStep(var, produced)
    return new_system, EliminationTrace(frozenset(system.ids()), (step,))


def _chain(system: System, order: list[int]) -> tuple[list[System], EliminationTrace]:
    trace = EliminationTrace(frozenset(system.ids()))
    chain = [system]
    current = system
    floor = system.next_id()
    for var in order:
        current, step_trace = eliminate_var(current, var, start_id=floor)
        floor = max(floor, current.next_id())
        trace = trace.extend(step_trace.steps[0])
        chain.append(current)
    return chain, trace


def _first_contradiction(system: System) -> int | None:
    for c in system.constraints:
        if is_zero_row(c) is RowClass.CONTRADICTION:
            return c.cid
    return None


def _bounds_for(system: System, var: int, known: dict[int, Fraction]):
    """Lower/upper bounds on var from rows of `system` with later vars fixed."""
    lo = hi = None
    lo_strict = hi_strict = False
    for c in system.constraints:
        a = c.expr.coeff(var)
        if a == 0:
            continue
        rest = c.expr.drop(var)
        residue = c.rhs - rest.value_at(Point.of(known))
        bound = residue / a
        strict = c.relation is Relation.LT
        if a > 0:
            if hi is None or bound < hi or (bound == hi and strict):
                hi, hi_strict = bound, strict
        else:
            if lo is None or bound > lo or (bound == lo and strict):
                lo, lo_strict = bound, strict
    return lo, lo_strict, hi, hi_strict


def _pick_midpoint(lo, lo_strict, hi, hi_strict) -> Fraction:
    if lo is not None and hi is not None:
        if lo < hi:
            return (lo + hi) / 2
        if lo == hi and not lo_strict and not hi_strict:
            return lo
        raise LincertError("empty interval during back-substitution")  # pragma: no cover
    if lo is not None:
        return lo + 1
    if hi is not None:
        return hi - 1
    return ZERO


def _back_substitute(chain: list[System], order: list[int], pick=_pick_midpoint) -> Point:
    known: dict[int, Fraction] = {}
    for i in range(len(order) - 1, -1, -1):
        var = order[i]
        known[var] = pick(*_bounds_for(chain[i], var, known))
    return Point.of(known)


def _cheapest_var(system: System, remaining) -> int:
    """Variable whose elimination adds the fewest rows (classic FM heuristic);
    deterministic tie-break on the index."""
    best = None
    for var in sorted(remaining):
        pos = neg = 0
        for c in system.constraints:
            a = c.expr.coeff(var)
            if a > 0:
                pos += 1
            elif a < 0:
                neg += 1
        cost = pos * neg - (pos + neg)
        if best is None or cost < best[0]:
            best = (cost, var)
    return best[1]


def feasibility(system: System, order: list[int] | str | None = None) -> FeasibilityVerdict:
    """Decide the system exactly, with evidence either way.

    Feasible verdicts carry a witness point (midpoint back-substitution);
    infeasible verdicts carry nonnegative multipliers over the input rows
    whose combination is a contradiction row.

    By default variables go in table order, which keeps witnesses stable;
    order="greedy" picks the cheapest variable each step instead (same
    verdicts and valid evidence, different intermediate growth), which is
    what the flag-only probes in the cone and implicit modules use.
    """
    greedy = order == "greedy"
    pending = list(range(len(system.variables))) if (order is None or greedy) else list(order)
    trace = EliminationTrace(frozenset(system.ids()))
    chain = [system]
    chosen: list[int] = []
    current = system
    floor = system.next_id()
    bad = _first_contradiction(current)
    remaining = set(pending)
    while remaining and bad is None:
        var = _cheapest_var(current, remaining) if greedy else pending[len(chosen)]
        remaining.discard(var)
        chosen.append(var)
        current, step_trace = eliminate_var(current, var, start_id=floor)
        floor = max(floor, current.next_id())
        trace = trace.extend(step_trace.steps[0])
        chain.append(current)
        bad = _first_contradiction(current)
    if bad is not None:
        return FeasibilityVerdict(False, certificate=farkas_from_trace(trace, bad))
    witness = _back_substitute(chain, chosen)
    # Variables outside the elimination order would be unassigned; the default
    # order covers the whole table, explicit orders must too.
    for v in range(len(system.variables)):
        if not witness.has(v):
            raise LincertError("elimination order must cover every variable")
    return FeasibilityVerdict(True, witness=witness)


def sample_point(system: System, rng: random.Random) -> Point:
    """Random feasible point via perturbed back-substitution.

    Raises InfeasibleSystemError-style LincertError if the system is
    infeasible; check feasibility first when unsure.
    """
    order = list(range(len(system.variables)))
    chain, trace = _chain(system, order)
    if _first_contradiction(chain[-1]) is not None:
        raise LincertError("cannot sample from an infeasible system")

    def pick(lo, lo_strict, hi, hi_strict) -> Fraction:
        if lo is not None and hi is not None:
            if lo == hi:
                return lo
            k = rng.randint(1, 15)
            return lo + (hi - lo) * Fraction(k, 16)
        if lo is not None:
            return lo + rng.randint(1, 8)
        if hi is not None:
            return hi - rng.randint(1, 8)
        return Fraction(rng.randint(-4, 4))

    return _back_substitute(chain, order, pick)


def project(system: System, keep: set[int] | frozenset[int]) -> System:
    """Eliminate every variable not in `keep` (table order); solution set is
    the coordinate projection."""
    for v in keep:
        if not 0 <= v < len(system.variables):
            raise UnknownVariableError(f"no variable index {v}")
    current = system
    floor = system.next_id()
    for var in range(len(system.variables)):
        if var not in keep:
            current, _ = eliminate_var(current, var, start_id=floor)
            floor = max(floor, current.next_id())
    return current


def farkas_from_trace(trace: EliminationTrace, cid: int) -> MultiplierVector:
    """Replay a derived contradiction row back to input-row multipliers.

    Weights flow from the target row down through the first recorded
    derivation of each intermediate row; ids increase along derivations, so a
    single descending pass suffices.
    """
    derivations = trace.derivation_map()
    if cid in trace.input_ids:
        return MultiplierVector.of({cid: 1})
    if cid not in derivations:
        raise UnknownConstraintError(f"constraint {cid} is not recorded in the trace")
    weights: dict[int, Fraction] = {cid: Fraction(1)}
    result: dict[int, Fraction] = {}
    for current in sorted(weights.keys() | derivations.keys(), reverse=True):
        w = weights.pop(current, None)
        if w is None or w == 0:
            continue
        if current in trace.input_ids:
            result[current] = result.get(current, ZERO) + w
            continue
        if current not in derivations:
            raise UnknownConstraintError(f"constraint {current} is not recorded in the trace")
        for parent, coeff in derivations[current][0]:
            weights[parent] = weights.get(parent, ZERO) + w * coeff
    for current, w in weights.items():
        if w != 0:
            if current not in trace.input_ids:
                raise UnknownConstraintError(f"constraint {current} is not recorded in the trace")
            result[current] = result.get(current, ZERO) + w
    return MultiplierVector.of(result)


def is_infeasibility_certificate(system: System, lam: MultiplierVector) -> bool:
    """True iff the combination is a contradiction row ([0] <= r < 0, or
    [0] < r <= 0 when strict rows carry weight)."""
    combined = combine(system, lam)
    if not combined.expr.is_zero:
        return False
    if combined.relation is Relation.LT:
        return combined.rhs <= 0
    return combined.rhs < 0
