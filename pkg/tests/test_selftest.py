import math
from fractions import Fraction as F

import pytest

import graphspread.lambda_inf as lambda_inf
import graphspread.mve as mve
from graphspread.selftest import MUTATIONS, run_selftest


def failing_suites(report):
    return sorted(k for k, v in report["suites"].items() if not v["ok"])


def test_clean_run_passes_everything():
    report = run_selftest()
    assert report["ok"] is True
    assert failing_suites(report) == []
    assert len(report["suites"]) == 9


def test_tau_mutation_fails_only_rounding():
    report = run_selftest(mutate="tau")
    assert report["ok"] is False
    assert failing_suites(report) == ["rounding"]


def test_grid_mutation_fails_only_approximation():
    report = run_selftest(mutate="grid")
    assert report["ok"] is False
    assert failing_suites(report) == ["approximation"]


def test_mutations_are_restored_after_the_run():
    run_selftest(mutate="tau")
    assert mve._TAU_LOG is math.log
    run_selftest(mutate="grid")
    assert lambda_inf._GRID_SCALE == F(1)


def test_unknown_mutation_rejected():
    with pytest.raises(ValueError):
        run_selftest(mutate="half")
    assert MUTATIONS == ("none", "tau", "grid")
