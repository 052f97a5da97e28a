"""Seeded differential testing of the solvability pipeline against the
elimination oracle.

Trials draw bounded standard-shape systems from a counter-based SHA-256
stream (same seed, same bytes, on any platform or Python version), run both
deciders, and record agreement.  Disagreements are first-class results, not
failures: the pipeline's verdict rule is the object under measurement, and
each disagreement ships with enough material to replay both sides.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass

from .core import LincertError, System, evaluate, make_system
from .cone import is_bounded, is_reduced_to_origin
from .fourier import feasibility, is_infeasibility_certificate
from .pipeline import ExploreBudgetExceeded, MAIN_ROWS_FIRST, explore, run
from .sysfile import format_rational, print_system


class CounterStream:
    """Deterministic uniform integers from SHA-256(seed, label, counter)."""

    def __init__(self, seed: int, label: str = ""):
        self._key = hashlib.sha256(f"{seed}|{label}".encode()).digest()
        self._counter = 0
        self._pool: list[int] = []

    def _word(self) -> int:
        if not self._pool:
            block = hashlib.sha256(self._key + self._counter.to_bytes(8, "big")).digest()
            self._counter += 1
            self._pool = [
                int.from_bytes(block[i : i + 8], "big") for i in range(0, 32, 8)
            ]
        return self._pool.pop()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], rejection-sampled to avoid bias."""
        if lo > hi:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (2**64 // span) * span
        while True:
            w = self._word()
            if w < limit:
                return lo + w % span


@dataclass(frozen=True)
class GenParams:
    max_vars: int = 4
    max_cons: int = 6
    coeff_lo: int = -5
    coeff_hi: int = 5
    mode: str = "box"  # "box" | "filter"
    seed: int = 0

    def __post_init__(self):
        if self.max_vars < 1:
            raise LincertError("max_vars must be at least 1")
        if self.coeff_lo > self.coeff_hi:
            raise LincertError("empty coefficient range")
        if self.mode not in ("box", "filter"):
            raise LincertError(f"unknown boundedness mode {self.mode!r}")

    def to_dict(self) -> dict:
        return {
            "max_vars": self.max_vars,
            "max_cons": self.max_cons,
            "coeff_lo": self.coeff_lo,
            "coeff_hi": self.coeff_hi,
            "mode": self.mode,
            "seed": self.seed,
        }


def generate_bounded(stream: CounterStream, params: GenParams) -> System:
    """One random bounded standard-shape system.

    Box mode appends a cap x_j <= U_j per variable, which forces a trivial
    recession cone outright; filter mode rejection-samples on is_bounded and
    errors out after 1000 rejections.
    """
    nvars = stream.randint(1, params.max_vars)
    names = [f"x{i + 1}" for i in range(nvars)]
    for attempt in range(1000):
        rows = []
        for _ in range(stream.randint(1, params.max_cons)):
            coeffs = {n: stream.randint(params.coeff_lo, params.coeff_hi) for n in names}
            rows.append((coeffs, "<=", stream.randint(params.coeff_lo, params.coeff_hi)))
        if params.mode == "box":
            for n in names:
                rows.append(({n: 1}, "<=", stream.randint(1, 5)))
        system = make_system(names, mains=rows, nonneg="all")
        if params.mode == "box" or is_bounded(system):
            return system
    raise LincertError("filter mode exceeded 1000 rejections without a bounded draw")


@dataclass(frozen=True)
class TrialReport:
    index: int
    system_text: str
    status: str  # "ok" | "error"
    oracle_feasible: bool | None = None
    pipeline_solvable: bool | None = None
    agreement: bool | None = None
    pivot_sensitive: bool | None = None  # None: not explored (too big or budget hit)
    interval: str | None = None
    error: str | None = None
    detail: dict | None = None  # full replay material for disagreements

    def to_dict(self) -> dict:
        d = {
            "index": self.index,
            "system": self.system_text,
            "status": self.status,
            "oracle_feasible": self.oracle_feasible,
            "pipeline_solvable": self.pipeline_solvable,
            "agreement": self.agreement,
            "pivot_sensitive": self.pivot_sensitive,
            "interval": self.interval,
        }
        if self.error is not None:
            d["error"] = self.error
        if self.detail is not None:
            d["detail"] = self.detail
        return d


@dataclass(frozen=True)
class AggregateReport:
    params: GenParams
    trials: tuple[TrialReport, ...]
    wall_clock_seconds: float

    @property
    def trial_count(self) -> int:
        return len(self.trials)

    @property
    def agreement_count(self) -> int:
        return sum(1 for t in self.trials if t.agreement)

    @property
    def disagreements(self) -> tuple[TrialReport, ...]:
        return tuple(t for t in self.trials if t.agreement is False)

    @property
    def pivot_sensitive_count(self) -> int:
        return sum(1 for t in self.trials if t.pivot_sensitive)

    def to_dict(self, include_wall_clock: bool = True) -> dict:
        d = {
            "kind": "difftest-report",
            "version": 1,
            "params": self.params.to_dict(),
            "trial_count": self.trial_count,
            "agreement_count": self.agreement_count,
            "agreement_rate": (
                format_rational_ratio(self.agreement_count, self.trial_count)
                if self.trial_count
                else None
            ),
            "pivot_sensitive_count": self.pivot_sensitive_count,
            "trials": [t.to_dict() for t in self.trials],
            "disagreements": [t.index for t in self.disagreements],
        }
        if include_wall_clock:
            d["wall_clock_seconds"] = self.wall_clock_seconds
        return d

    def to_json(self, include_wall_clock: bool = True) -> str:
        return json.dumps(self.to_dict(include_wall_clock), indent=2, sort_keys=True) + "\n"


def format_rational_ratio(num: int, den: int) -> str:
    from fractions import Fraction

    return format_rational(Fraction(num, den))


def oracle_verdict(system: System) -> bool:
    """Solvability in the sense the pipeline answers it.

    For a cone-flagged input the question is whether the cone has a point
    other than the origin; for everything else it is plain feasibility.  The
    oracle's own evidence is verified before the verdict is trusted.
    """
    if system.is_cone:
        return not is_reduced_to_origin(system)
    verdict = feasibility(system)
    if verdict.feasible:
        if not all(evaluate(c, verdict.witness) for c in system.constraints):
            raise LincertError("oracle witness failed verification")  # pragma: no cover
    else:
        if not is_infeasibility_certificate(system, verdict.certificate):
            raise LincertError("oracle certificate failed verification")  # pragma: no cover
    return verdict.feasible


def run_trial(
    index: int,
    system: System,
    explore_lambda_limit: int = 6,
    explore_budget: int = 4000,
    rule=MAIN_ROWS_FIRST,
) -> TrialReport:
    text = print_system(system)
    try:
        oracle = oracle_verdict(system)
        trace = run(system, rule)
        solvable = trace.solvable
        agreement = oracle == solvable
        sensitive = None
        if len(trace.working.system.variables) <= explore_lambda_limit:
            try:
                sensitive = explore(system, state_budget=explore_budget).pivot_sensitive
            except ExploreBudgetExceeded:
                sensitive = None
        detail = None
        if not agreement:
            detail = {
                "steps": [
                    {
                        "eliminated": s.var_name,
                        "pivot": s.pivot_label,
                        "kind": s.kind,
                        "system": print_system(s.system, orientation="ge"),
                    }
                    for s in trace.steps
                ],
                "working_system": print_system(trace.working.system, orientation="ge"),
                "terminal_system": print_system(trace.terminal, orientation="ge"),
            }
        return TrialReport(
            index=index,
            system_text=text,
            status="ok",
            oracle_feasible=oracle,
            pipeline_solvable=solvable,
            agreement=agreement,
            pivot_sensitive=sensitive,
            interval=trace.interval.describe(),
            detail=detail,
        )
    except LincertError as exc:
        return TrialReport(index=index, system_text=text, status="error", error=str(exc))


def run_difftest(
    params: GenParams,
    trials: int,
    explore_lambda_limit: int = 6,
    explore_budget: int = 4000,
) -> AggregateReport:
    """Generate, decide both ways, aggregate.  Deterministic up to wall clock."""
    start = time.monotonic()
    reports = []
    for i in range(trials):
        stream = CounterStream(params.seed, f"trial-{i}")
        system = generate_bounded(stream, params)
        reports.append(run_trial(i, system, explore_lambda_limit, explore_budget))
    return AggregateReport(params, tuple(reports), time.monotonic() - start)
