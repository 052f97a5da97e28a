import json

import pytest

from lincert.core import LincertError, evaluate, make_system
from lincert.cone import is_bounded
from lincert.fourier import feasibility, is_infeasibility_certificate
from lincert.harness import (
    CounterStream,
    GenParams,
    generate_bounded,
    oracle_verdict,
    run_difftest,
    run_trial,
)
from lincert.pipeline import MAIN_ROWS_FIRST, run
from lincert.sysfile import parse, print_system


def test_counter_stream_is_deterministic_and_splittable():
    s = CounterStream(7, "trial-0")
    a = [s.randint(0, 10**6) for _ in range(5)]
    assert len(set(a)) > 1  # draws vary within a stream
    s1, s2 = CounterStream(7, "trial-0"), CounterStream(7, "trial-0")
    assert [s1.randint(0, 100) for _ in range(20)] == [s2.randint(0, 100) for _ in range(20)]
    assert CounterStream(7, "trial-0").randint(0, 10**9) != CounterStream(7, "trial-1").randint(0, 10**9)


def test_counter_stream_range():
    s = CounterStream(3)
    draws = [s.randint(-2, 2) for _ in range(300)]
    assert set(draws) == {-2, -1, 0, 1, 2}
    with pytest.raises(ValueError):
        s.randint(3, 2)


def test_gen_params_validation():
    with pytest.raises(LincertError):
        GenParams(max_vars=0)
    with pytest.raises(LincertError):
        GenParams(coeff_lo=2, coeff_hi=-2)
    with pytest.raises(LincertError):
        GenParams(mode="fuzzy")


def test_generated_systems_are_bounded_and_standard():
    for mode in ("box", "filter"):
        params = GenParams(mode=mode, seed=11)
        for i in range(8):
            sys = generate_bounded(CounterStream(params.seed, f"trial-{i}"), params)
            assert is_bounded(sys)
            assert len(sys.sign_rows()) == len(sys.variables)
            if mode == "box":
                # Some cap row x_j <= U_j is present for each variable.
                for v, name in enumerate(sys.variables):
                    assert any(
                        dict(c.expr.terms) == {v: 1} and c.rhs >= 1
                        for c in sys.main_rows()
                    )


def test_identical_seeds_give_identical_systems():
    params = GenParams(seed=42)
    one = generate_bounded(CounterStream(42, "trial-0"), params)
    two = generate_bounded(CounterStream(42, "trial-0"), params)
    assert print_system(one) == print_system(two)


def test_oracle_verdict_on_cone_inputs():
    pinched = make_system(
        ["x", "y"],
        mains=[({"x": 1, "y": 1}, "<=", 0), ({"x": -1, "y": -1}, "<=", 0)],
        nonneg="all",
        is_cone=True,
    )
    assert oracle_verdict(pinched) is False
    open_cone = make_system(
        ["x", "y"],
        mains=[({"x": 1, "y": -2}, "<=", 0)],
        nonneg="all",
        is_cone=True,
    )
    assert oracle_verdict(open_cone) is True


def test_bundled_cones_agree_as_fixed_trials():
    solvable = make_system(
        ["x", "y"],
        mains=[
            ({"x": 1, "y": -2}, "<=", 0),
            ({"x": 1, "y": -1}, "<=", 0),
            ({"x": 1, "y": -3}, "<=", 0),
        ],
        nonneg="all",
        is_cone=True,
    )
    report = run_trial(0, solvable)
    assert report.status == "ok"
    assert report.oracle_feasible is True and report.pipeline_solvable is True
    assert report.agreement is True

    pinched = make_system(
        ["x", "y"],
        mains=[({"x": 1, "y": 1}, "<=", 0), ({"x": -1, "y": -1}, "<=", 0)],
        nonneg="all",
        is_cone=True,
    )
    from lincert.pipeline import pivot_sequence

    documented = pivot_sequence([("l3", "row-x"), ("l2", "sign-l3")])
    report = run_trial(1, pinched, rule=documented)
    assert report.oracle_feasible is False and report.pipeline_solvable is False
    assert report.agreement is True
    assert report.pivot_sensitive is True  # the two-row cone is the sensitive one

    # Under the default rule the same cone is a recorded disagreement: the
    # default pivot order ends at the point interval {1}.
    default_report = run_trial(1, pinched)
    assert default_report.pipeline_solvable is True
    assert default_report.agreement is False
    assert default_report.detail is not None


def test_difftest_zero_trials():
    report = run_difftest(GenParams(seed=1), 0)
    assert report.trial_count == 0
    data = report.to_dict()
    assert data["agreement_rate"] is None
    assert data["trials"] == []


def test_difftest_reports_are_deterministic():
    params = GenParams(seed=42)
    a = run_difftest(params, 12)
    b = run_difftest(params, 12)
    assert a.to_json(include_wall_clock=False) == b.to_json(include_wall_clock=False)
    data = json.loads(a.to_json())
    assert data["trial_count"] == 12
    assert "wall_clock_seconds" in data
    assert "wall_clock_seconds" not in json.loads(a.to_json(include_wall_clock=False))


def test_every_trial_replays():
    params = GenParams(seed=7)
    report = run_difftest(params, 10)
    for trial in report.trials:
        assert trial.status == "ok"
        system = parse(trial.system_text)
        assert oracle_verdict(system) == trial.oracle_feasible
        assert run(system, MAIN_ROWS_FIRST).solvable == trial.pipeline_solvable


def test_oracle_evidence_is_rechecked_per_trial():
    params = GenParams(seed=3)
    for i in range(10):
        sys = generate_bounded(CounterStream(params.seed, f"trial-{i}"), params)
        verdict = feasibility(sys)
        if verdict.feasible:
            assert all(evaluate(c, verdict.witness) for c in sys.constraints)
        else:
            assert is_infeasibility_certificate(sys, verdict.certificate)