#!/usr/bin/env python3
"""Regenerate the committed differential-testing baseline.

Runs the standard 500-trial difftest at seed 42 and writes the report
(without the wall-clock field, which is the only nondeterministic part) to
baseline/difftest-seed42-trials500.json.  The acceptance suite compares a
fresh run against this file byte-for-byte.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lincert.harness import GenParams, run_difftest

OUT = pathlib.Path(__file__).resolve().parents[1] / "baseline" / "difftest-seed42-trials500.json"


def main():
    report = run_difftest(GenParams(seed=42), 500)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(report.to_json(include_wall_clock=False))
    rate = report.agreement_count / report.trial_count
    print(f"trials: {report.trial_count}")
    print(f"agreements: {report.agreement_count} ({rate:.1%})")
    print(f"pivot-sensitive: {report.pivot_sensitive_count}")
    print(f"disagreements: {len(report.disagreements)}")
    print(f"wall clock: {report.wall_clock_seconds:.1f}s")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
