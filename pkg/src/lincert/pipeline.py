"""Bounded-system solvability via Gaussian elimination on the strong dual.

The route: homogenize the input to its primal cone (unless it already is
one), cap it with a first row sum(x) <= 2, and take the sigma-substituted
strong elementary dual of the capped cone with the all-ones objective.  That
dual is a pure multiplier system whose first variable l1 belongs to the cap
row and whose extension row is -2*l1 >= -2.  Every other l variable is then
substituted out through some eligible row set to equality (its sign row
becoming a main row), leaving a one-variable system in l1.  The verdict read
off the terminal interval is Solvable exactly when the interval is the single
point {1}.

Pivot choice is not canonical: different admissible sequences can end in
different terminal intervals and even different verdicts.  The rule object
makes the choice explicit and reproducible, and `explore` enumerates the
whole pivot tree to quantify the sensitivity.  Whether the verdict agrees
with direct elimination on the input is measured, never assumed; see the
harness module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Constraint,
    LincertError,
    LinearExpr,
    Provenance,
    Relation,
    RowClass,
    System,
    ZERO,
    is_zero_row,
    rat,
    validate_standard_shape,
)
from .cone import NonHomogeneousError, is_bounded, primal_cone
from .dual import strong_elementary_dual
from .gauss import substitute_through


class UnboundedInputError(LincertError):
    pass


class PivotRuleError(LincertError):
    pass


class ExploreBudgetExceeded(LincertError):
    pass


@dataclass(frozen=True)
class PivotRule:
    kind: str  # "main-first" | "paper-seq" | "explicit-order"
    sequence: tuple[tuple[str, str], ...] = ()  # (lambda name, row label) pairs
    order: tuple[str, ...] = ()


MAIN_ROWS_FIRST = PivotRule("main-first")


def pivot_sequence(pairs) -> PivotRule:
    return PivotRule("paper-seq", sequence=tuple((str(a), str(b)) for a, b in pairs))


def explicit_order(names) -> PivotRule:
    return PivotRule("explicit-order", order=tuple(names))


@dataclass(frozen=True)
class Interval:
    empty: bool = False
    lo: Fraction | None = None
    lo_open: bool = False
    hi: Fraction | None = None
    hi_open: bool = False

    def is_point(self, value) -> bool:
        value = rat(value)
        return (
            not self.empty
            and self.lo == value
            and self.hi == value
            and not self.lo_open
            and not self.hi_open
        )

    def describe(self) -> str:
        if self.empty:
            return "empty"
        left = "(" if self.lo_open or self.lo is None else "["
        right = ")" if self.hi_open or self.hi is None else "]"
        lo = str(self.lo) if self.lo is not None else "-inf"
        hi = str(self.hi) if self.hi is not None else "+inf"
        return f"{left}{lo}, {hi}{right}"


def terminal_interval(system: System, var: int) -> Interval:
    """Exact feasible interval of a one-variable system."""
    lo = hi = None
    lo_open = hi_open = False
    empty = False
    for c in system.constraints:
        extra = [v for v, _ in c.expr.terms if v != var]
        if extra:
            names = ", ".join(system.variables[v] for v in extra)
            raise LincertError(f"terminal system still mentions {names}")
        if c.relation is Relation.EQ:
            raise LincertError(f"terminal system contains an equality row {c.cid}")
        a = c.expr.coeff(var)
        if a == 0:
            if is_zero_row(c) is RowClass.CONTRADICTION:
                empty = True
            continue
        bound = c.rhs / a
        strict = c.relation is Relation.LT
        if a > 0:
            if hi is None or bound < hi or (bound == hi and strict):
                hi, hi_open = bound, strict
        else:
            if lo is None or bound > lo or (bound == lo and strict):
                lo, lo_open = bound, strict
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_open or hi_open)):
            empty = True
    if empty:
        return Interval(empty=True)
    return Interval(False, lo, lo_open, hi, hi_open)


@dataclass(frozen=True)
class WorkingSystem:
    primal: System
    cone: System
    augmented: System
    system: System  # the multiplier system the elimination loop works on
    labels: tuple[tuple[int, str], ...]
    extension_id: int
    lambda_one: int
    sigma: Fraction

    def label_of(self, cid: int) -> str:
        return dict(self.labels)[cid]


@dataclass(frozen=True)
class PipelineStep:
    var: int
    var_name: str
    pivot_id: int | None
    pivot_label: str | None
    kind: str  # "original-main" | "converted-sign" | "fallback-zero"
    system: System


@dataclass(frozen=True)
class PipelineTrace:
    working: WorkingSystem
    steps: tuple[PipelineStep, ...]
    terminal: System
    interval: Interval
    verdict: str  # "solvable" | "unsolvable"

    @property
    def solvable(self) -> bool:
        return self.verdict == "solvable"


def build_working_system(primal: System, sigma=2) -> WorkingSystem:
    """Cap the (primal) cone with sum(x) <= sigma and dualize.

    A system flagged as a cone must already be homogeneous standard shape and
    is used as-is; anything else must be bounded standard shape and is
    homogenized first.  The cap row goes in first so its multiplier is l1.
    """
    sigma = rat(sigma)
    if primal.is_cone:
        validate_standard_shape(primal)
        for c in primal.constraints:
            if c.rhs != 0:
                raise NonHomogeneousError(
                    f"system is flagged as a cone but row {c.cid} has right side {c.rhs}"
                )
        cone = primal
    else:
        validate_standard_shape(primal)
        if not is_bounded(primal):
            raise UnboundedInputError(
                "input has a solution at infinity; the verdict rule needs a bounded system"
            )
        cone = primal_cone(primal).system

    mains, _ = validate_standard_shape(cone)
    nvars = len(cone.variables)
    rows = [
        Constraint(
            0,
            LinearExpr.from_terms({v: 1 for v in range(nvars)}),
            Relation.LE,
            sigma,
            Provenance.main(),
        )
    ]
    for i, row in enumerate(mains):
        rows.append(Constraint(1 + i, row.expr, Relation.LE, row.rhs, Provenance.main()))
    cid = 1 + len(mains)
    for v in range(nvars):
        rows.append(Constraint(cid, LinearExpr.from_terms({v: -1}), Relation.LE, ZERO, Provenance.sign()))
        cid += 1
    augmented = System(cone.variables, tuple(rows))

    ones = LinearExpr.from_terms({v: 1 for v in range(nvars)})
    sd = strong_elementary_dual(augmented, ones, sigma=sigma)
    labels = []
    for row_cid, var in sd.row_origin:
        labels.append((row_cid, f"row-{cone.variables[var]}"))
    labels.append((sd.extension_id, "extension"))
    for lam, _ in sd.lambda_origin:
        labels.append((sd.sign_id(lam), f"sign-l{lam + 1}"))
    return WorkingSystem(
        primal=primal,
        cone=cone,
        augmented=augmented,
        system=sd.system,
        labels=tuple(labels),
        extension_id=sd.extension_id,
        lambda_one=0,
        sigma=sigma,
    )


def _eligible_pivots(system: System, var: int):
    out = []
    for c in system.constraints:
        if c.provenance.kind in ("sign", "extension"):
            continue
        if c.expr.coeff(var) != 0:
            out.append(c)
    return out


def _pivot_kind(label: str) -> str:
    return "original-main" if label.startswith("row-") else "converted-sign"


def _fallback_zero(system: System, var: int) -> System:
    sign_row = system.sign_row_for(var)
    rows = [c for c in system.constraints if sign_row is None or c.cid != sign_row.cid]
    for c in rows:
        if c.expr.coeff(var) != 0:  # pragma: no cover - structural invariant
            raise LincertError("fallback hit a row that still mentions the variable")
    return system.with_rows(rows)


def _apply_step(system: System, labels: dict[int, str], var: int, pivot: Constraint | None):
    var_name = system.variables[var]
    if pivot is None:
        new_system = _fallback_zero(system, var)
        step = PipelineStep(var, var_name, None, None, "fallback-zero", new_system)
        return new_system, labels, step
    new_system, _ = substitute_through(system, var, pivot.cid, homogeneous=False)
    new_labels = {cid: lab for cid, lab in labels.items() if cid != pivot.cid}
    label = labels[pivot.cid]
    step = PipelineStep(var, var_name, pivot.cid, label, _pivot_kind(label), new_system)
    return new_system, new_labels, step


def _choose_main_first(system: System, labels: dict[int, str], var: int) -> Constraint | None:
    candidates = _eligible_pivots(system, var)
    if not candidates:
        return None
    originals = [c for c in candidates if labels[c.cid].startswith("row-")]
    pool = originals if originals else candidates
    return min(pool, key=lambda c: c.cid)


def run(primal: System, rule: PivotRule = MAIN_ROWS_FIRST, sigma=2) -> PipelineTrace:
    """Run the elimination loop to a one-variable verdict on l1."""
    ws = build_working_system(primal, sigma=sigma)
    system = ws.system
    labels = dict(ws.labels)
    remaining = [v for v in range(len(system.variables)) if v != ws.lambda_one]
    steps: list[PipelineStep] = []

    if rule.kind == "paper-seq":
        plan = list(rule.sequence)
        planned = []
        for lname, _ in plan:
            if lname not in system.variables:
                raise PivotRuleError(f"no multiplier variable named {lname!r}")
            planned.append(system.variables.index(lname))
        if sorted(planned) != sorted(remaining):
            raise PivotRuleError(
                "pivot sequence must eliminate every multiplier except l1 exactly once"
            )
        for lname, row_label in plan:
            var = system.variables.index(lname)
            by_label = {labels[c.cid]: c for c in system.constraints if c.cid in labels}
            if row_label not in by_label:
                raise PivotRuleError(f"no row labeled {row_label!r} at this step")
            pivot = by_label[row_label]
            if pivot.provenance.kind in ("sign", "extension"):
                raise PivotRuleError(f"row {row_label!r} is not an admissible pivot")
            if pivot.expr.coeff(var) == 0:
                raise PivotRuleError(f"row {row_label!r} does not mention {lname}")
            system, labels, step = _apply_step(system, labels, var, pivot)
            steps.append(step)
    else:
        if rule.kind == "explicit-order":
            order = []
            for lname in rule.order:
                if lname not in system.variables:
                    raise PivotRuleError(f"no multiplier variable named {lname!r}")
                order.append(system.variables.index(lname))
            if sorted(order) != sorted(remaining):
                raise PivotRuleError(
                    "explicit order must list every multiplier except l1 exactly once"
                )
        elif rule.kind == "main-first":
            order = remaining
        else:
            raise PivotRuleError(f"unknown pivot rule kind {rule.kind!r}")
        for var in order:
            pivot = _choose_main_first(system, labels, var)
            system, labels, step = _apply_step(system, labels, var, pivot)
            steps.append(step)

    interval = terminal_interval(system, ws.lambda_one)
    verdict = "solvable" if interval.is_point(1) else "unsolvable"
    return PipelineTrace(ws, tuple(steps), system, interval, verdict)


@dataclass(frozen=True)
class ExploreOutcome:
    interval: Interval
    verdict: str
    sequence: tuple[tuple[str, str], ...]  # (lambda name, row label or "zero") witness


@dataclass(frozen=True)
class ExploreResult:
    outcomes: tuple[ExploreOutcome, ...]
    sequence_count: int
    pivot_sensitive: bool
    states: int


def explore(primal: System, state_budget: int = 4000, sigma=2) -> ExploreResult:
    """Walk every admissible pivot sequence (all lambda orders, all eligible
    rows; the zero fallback only when no row is eligible).

    States reached by different label-preserving paths are merged, so the
    walk is a DAG traversal; `state_budget` caps the number of distinct
    states and a LincertError subclass is raised beyond it.  The input is
    pivot-sensitive when two sequences end in different verdicts.
    """
    ws = build_working_system(primal, sigma=sigma)
    lambda_one = ws.lambda_one
    names = ws.system.variables
    memo: dict = {}
    states = 0

    def state_key(system: System, labels: dict[int, str], remaining: frozenset[int]):
        rows = tuple(
            sorted((labels.get(c.cid, ""), c.expr.terms, c.relation.value, c.rhs) for c in system.constraints)
        )
        return (remaining, rows)

    def visit(system: System, labels: dict[int, str], remaining: frozenset[int]):
        nonlocal states
        key = state_key(system, labels, remaining)
        if key in memo:
            return memo[key]
        states += 1
        if states > state_budget:
            raise ExploreBudgetExceeded(f"pivot tree exceeds {state_budget} distinct states")
        if not remaining:
            interval = terminal_interval(system, lambda_one)
            verdict = "solvable" if interval.is_point(1) else "unsolvable"
            result = ({(interval, verdict): ()}, 1)
            memo[key] = result
            return result
        outcomes: dict = {}
        count = 0
        for var in sorted(remaining):
            candidates = _eligible_pivots(system, var)
            moves = [(var, c) for c in sorted(candidates, key=lambda c: c.cid)] or [(var, None)]
            for mvar, pivot in moves:
                new_system, new_labels, step = _apply_step(system, labels, mvar, pivot)
                sub_outcomes, sub_count = visit(new_system, new_labels, remaining - {mvar})
                count += sub_count
                head = (names[mvar], step.pivot_label if pivot is not None else "zero")
                for outcome_key, suffix in sub_outcomes.items():
                    outcomes.setdefault(outcome_key, (head,) + suffix)
        memo[key] = (outcomes, count)
        return memo[key]

    remaining = frozenset(v for v in range(len(names)) if v != lambda_one)
    outcomes, count = visit(ws.system, dict(ws.labels), remaining)
    ordered = sorted(
        (ExploreOutcome(interval, verdict, seq) for (interval, verdict), seq in outcomes.items()),
        key=lambda o: (o.verdict, o.interval.describe(), o.sequence),
    )
    verdicts = {o.verdict for o in ordered}
    return ExploreResult(tuple(ordered), count, len(verdicts) > 1, states)
