"""Acceptance battery: prints one PASS/FAIL line per criterion, even under output capture."""
import subprocess
import sys

import pytest

from rieszschur.acceptance import CRITERIA, TIME_LIMITS, run_criterion


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number, capsys):
    result = run_criterion(number, seed=42)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.summary
    limit = TIME_LIMITS.get(number)
    if limit is not None:
        assert result.elapsed <= limit, f"took {result.elapsed:.2f} s, limit {limit} s"


def test_criterion_11_suite_output_is_byte_identical(capsys):
    cmd = [sys.executable, "-m", "rieszschur.cli", "suite", "--seed", "42"]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    passed = first.returncode == 0 and first.stdout == second.stdout and len(first.stdout) > 0
    with capsys.disabled():
        print(f"\n[{'PASS' if passed else 'FAIL'}] criterion 11: suite output is byte-identical across runs")
    assert first.returncode == 0, first.stderr.decode()
    assert first.stdout == second.stdout
