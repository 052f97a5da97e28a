import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from lincert.cli import main

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "schema" / "report.schema.json").read_text())

SECTION2 = "vars: x y\n-x + y <= 2\nx - y <= -1\nnonneg: all\n"
SECTION2_INFEASIBLE = "vars: x y\n-x + y <= -2\nx - y <= 1\nnonneg: all\n"
SOLVABLE_CONE = "vars: x y\ncone\nx - 2*y <= 0\nx - y <= 0\nx - 3*y <= 0\nnonneg: all\n"
PINCHED_CONE = "vars: x y\ncone\nx + y <= 0\n-x - y <= 0\nnonneg: all\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [
        ("sec2", SECTION2),
        ("sec2_inf", SECTION2_INFEASIBLE),
        ("solvable", SOLVABLE_CONE),
        ("pinched", PINCHED_CONE),
    ]:
        p = tmp_path / f"{name}.sys"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    data = json.loads(capsys.readouterr().out)
    jsonschema.validate(data, SCHEMA)
    return code, data


def test_check_feasible(files, capsys):
    code, data = run_json(capsys, ["check", files["sec2"]])
    assert code == 0
    assert data["feasible"] is True
    assert set(data["witness"]) == {"x", "y"}
    assert data["certificate"] is None


def test_check_infeasible(files, capsys):
    code, data = run_json(capsys, ["check", files["sec2_inf"]])
    assert code == 1
    assert data["feasible"] is False
    assert data["certificate"] == {"0": "1", "1": "1"}


def test_check_human_output(files, capsys):
    assert main(["check", files["sec2"]]) == 0
    out = capsys.readouterr().out
    assert out.startswith("feasible")
    assert "witness:" in out


def test_check_quiet(files, capsys):
    assert main(["check", files["sec2"], "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_check_missing_file(capsys):
    assert main(["check", "/nonexistent/file.sys"]) == 2
    assert "error:" in capsys.readouterr().err


def test_check_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.sys"
    bad.write_text("vars: x\nx <=\n")
    assert main(["check", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_fourier_projection(files, capsys):
    code, data = run_json(capsys, ["fourier", files["sec2"], "--eliminate", "x"])
    assert code == 0
    assert "vars: x y" in data["system"]
    assert "x" not in data["system"].splitlines()[1]  # first row mentions only y


def test_fourier_unknown_variable(files, capsys):
    assert main(["fourier", files["sec2"], "--eliminate", "q"]) == 2


def test_dual_output_parses_back(files, capsys, tmp_path):
    code, data = run_json(capsys, ["dual", files["sec2"]])
    assert code == 0
    from lincert.sysfile import parse

    dual = parse(data["system"])
    assert dual.variables == ("l1", "l2")
    assert data["origin"] == {"l1": 0, "l2": 1}
    assert data["strong"] is False


def test_dual_human_has_origin_comments(files, capsys):
    assert main(["dual", files["sec2"]]) == 0
    out = capsys.readouterr().out
    assert "# l1 <- row 0: -x + y <= 2" in out
    assert "# extension" in out


def test_dual_strong_with_objective_and_sigma(files, capsys):
    code, data = run_json(
        capsys, ["dual", files["solvable"], "--strong", "--objective", "x + y", "--sigma", "2"]
    )
    assert code == 0
    assert data["strong"] is True and data["sigma"] == "2"


def test_dual_strong_needs_objective(files, capsys):
    assert main(["dual", files["sec2"], "--strong"]) == 2


def test_implicit_report(tmp_path, capsys):
    p = tmp_path / "im.sys"
    p.write_text("vars: y\n-3*y <= 0\ny <= 0\n")
    code, data = run_json(capsys, ["implicit", str(p)])
    assert code == 0
    assert data["feasible"] is True
    assert data["implicit_ids"] == [0, 1]
    lam = {k: data["certificate"][k] for k in data["certificate"]}
    assert set(lam) == {"0", "1"}


def test_cone_analyze(files, capsys):
    code, data = run_json(capsys, ["cone", files["sec2"], "--analyze"])
    assert code == 0
    assert data["z"] == "z"
    assert data["analysis"] == {
        "bounded": False,
        "reduced_to_origin": False,
        "full_dimensional": True,
    }


def test_cone_of_cone_input_is_identity(files, capsys):
    code, data = run_json(capsys, ["cone", files["pinched"], "--analyze"])
    assert code == 0
    assert data["z"] is None
    assert data["analysis"]["reduced_to_origin"] is True


def test_solve9_main_example_with_documented_sequence(files, capsys):
    code, data = run_json(
        capsys,
        ["solve9", files["solvable"], "--rule", "paper-seq:l3@row-x,l2@row-y,l4@sign-l3", "--trace"],
    )
    assert code == 0
    assert data["verdict"] == "solvable"
    assert data["interval"]["text"] == "[1, 1]"
    assert [s["kind"] for s in data["steps"]] == [
        "original-main",
        "original-main",
        "converted-sign",
    ]
    assert all(s["system"] for s in data["steps"])


def test_solve9_final_example_documented_sequence(files, capsys):
    code, data = run_json(
        capsys,
        ["solve9", files["pinched"], "--rule", "paper-seq:l3@row-x,l2@sign-l3"],
    )
    assert code == 1
    assert data["verdict"] == "unsolvable"
    assert data["interval"]["text"] == "[0, 1]"


def test_solve9_explore_flags_sensitivity(files, capsys):
    code, data = run_json(capsys, ["solve9", files["pinched"], "--explore"])
    assert code == 3
    assert data["explore"]["pivot_sensitive"] is True
    texts = {o["interval"]["text"] for o in data["explore"]["outcomes"]}
    assert len(texts) >= 2


def test_solve9_rejects_unbounded(files, tmp_path, capsys):
    p = tmp_path / "unbounded.sys"
    p.write_text("vars: x y\nx - y <= 0\nnonneg: all\n")
    assert main(["solve9", str(p)]) == 2


def test_solve9_bad_rule(files, capsys):
    assert main(["solve9", files["solvable"], "--rule", "nonsense"]) == 2
    assert main(["solve9", files["solvable"], "--rule", "paper-seq:l3row-x"]) == 2


def test_difftest_json_deterministic(capsys):
    code, data = run_json(capsys, ["difftest", "--seed", "42", "--trials", "10"])
    assert code == 0
    wall_a = data.pop("wall_clock_seconds")
    code, data2 = run_json(capsys, ["difftest", "--seed", "42", "--trials", "10"])
    data2.pop("wall_clock_seconds")
    assert wall_a >= 0
    assert data == data2
    assert data["trial_count"] == 10


def test_difftest_human_summary(capsys):
    assert main(["difftest", "--seed", "5", "--trials", "3"]) == 0
    out = capsys.readouterr().out
    assert "trials: 3" in out
    assert "agreement rate:" in out


def test_console_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "lincert.cli", "check", files["sec2_inf"]],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "infeasible" in proc.stdout