import random

import pytest

from lincert.core import (
    InfeasibleSystemError,
    MultiplierVector,
    Point,
    check_multiplier_certificate,
    evaluate,
    make_system,
)
from lincert.fourier import feasibility, sample_point
from lincert.implicit import implicit_set, is_implicit_equality, nonzero_multiplier_exists


def section2_primal(rhs1=2, rhs2=-1):
    return make_system(
        ["x", "y"],
        mains=[({"x": -1, "y": 1}, "<=", rhs1), ({"x": 1, "y": -1}, "<=", rhs2)],
        nonneg="all",
    )


def test_explicit_equality_pair():
    sys = make_system(["x"], mains=[({"x": 1}, "<=", 0), ({"x": -1}, "<=", 0)])
    flag, lam = is_implicit_equality(sys, 0)
    assert flag
    assert lam == MultiplierVector.of({0: 1, 1: 1})
    assert check_multiplier_certificate(sys, lam)


def test_worked_example_rows_are_not_implicit():
    sys = section2_primal()
    # (0, 1) satisfies -x + y <= 2 with slack 1, so row 0 cannot be implicit.
    flag, lam = is_implicit_equality(sys, 0)
    assert not flag and lam is None
    # (0, 2) satisfies x - y <= -1 with slack 1, so row 1 is not implicit either.
    assert evaluate(sys.constraint(1), Point.from_names(sys, {"x": 0, "y": 2}))
    flag, _ = is_implicit_equality(sys, 1)
    assert not flag


def test_infeasible_input_is_a_distinct_error():
    sys = section2_primal(rhs1=-2, rhs2=1)
    with pytest.raises(InfeasibleSystemError):
        is_implicit_equality(sys, 0)
    report = implicit_set(sys)
    assert not report.feasible
    assert report.implicit_ids == frozenset()


def test_implicit_set_of_fourier_projection_is_empty():
    sys = make_system(["y"], mains=[({"y": 1}, "<=", 0), ({"y": 3}, "<=", 0)])
    report = implicit_set(sys)
    assert report.feasible
    assert report.implicit_ids == frozenset()
    assert report.certificate.is_zero


def test_implicit_set_of_gaussian_image():
    sys = make_system(["y"], mains=[({"y": -3}, "<=", 0), ({"y": 1}, "<=", 0)])
    report = implicit_set(sys)
    assert report.implicit_ids == {0, 1}
    lam = report.certificate
    assert check_multiplier_certificate(sys, lam)
    # (1, 3) up to positive scaling.
    assert lam.get(1) == 3 * lam.get(0) and lam.get(0) > 0


def test_single_row_is_not_implicit():
    sys = make_system(["x"], mains=[({"x": 1}, "<=", 1)])
    assert implicit_set(sys).implicit_ids == frozenset()


def test_nonzero_multiplier_examples():
    cone = make_system(
        ["x", "y"],
        mains=[
            ({"x": 1, "y": 1}, "<=", 0),
            ({"x": 2, "y": -1}, "<=", 0),
            ({"x": -1, "y": 2}, "<=", 0),
        ],
    )
    flag, lam = nonzero_multiplier_exists(cone)
    assert not flag and lam is None

    pair = make_system(["x"], mains=[({"x": 1}, "<=", 0), ({"x": -1}, "<=", 0)])
    flag, lam = nonzero_multiplier_exists(pair)
    assert flag
    assert not lam.is_zero
    assert check_multiplier_certificate(pair, lam)


def test_dual_of_unsolvable_bounded_primal_has_no_nonzero_multipliers():
    from lincert.dual import elementary_dual

    primal = make_system(["x"], mains=[({"x": 1}, "<=", -1)], nonneg="all")
    assert not feasibility(primal).feasible
    dual = elementary_dual(primal)
    flag, _ = nonzero_multiplier_exists(dual.system)
    assert not flag


def test_reported_rows_are_tight_at_sampled_witnesses():
    rng = random.Random(2024)
    checked = 0
    while checked < 12:
        nvars = rng.randint(1, 3)
        names = [f"x{i}" for i in range(nvars)]
        rows = []
        for _ in range(rng.randint(1, 4)):
            coeffs = {n: rng.randint(-3, 3) for n in names}
            rows.append((coeffs, "<=", rng.randint(-2, 2)))
        sys = make_system(names, mains=rows)
        if not feasibility(sys).feasible:
            continue
        checked += 1
        report = implicit_set(sys)
        assert report.feasible
        witnesses = [sample_point(sys, rng) for _ in range(20)]
        for c in sys.constraints:
            tight_everywhere = all(c.expr.value_at(p) == c.rhs for p in witnesses)
            if c.cid in report.implicit_ids:
                assert tight_everywhere
                assert report.certificate.get(c.cid) > 0
        if report.implicit_ids:
            assert check_multiplier_certificate(sys, report.certificate)


def test_full_dimensional_systems_have_no_implicit_rows():
    from lincert.cone import is_full_dimensional

    sys = make_system(["x", "y"], mains=[({"x": 1, "y": 1}, "<=", 3)], nonneg="all")
    assert is_full_dimensional(sys)
    assert implicit_set(sys).implicit_ids == frozenset()
