"""The acceptance gate: every criterion at its stated tolerance.

Each criterion prints its own pass/fail line when the module runs; the
expensive quasiconvergence runs are shared between criteria 6 and 7 through
the module-scoped result list.
"""

import pytest

from nlheat.acceptance import CRITERIA, RUNTIME_BUDGETS, run_criteria


@pytest.fixture(scope="module")
def results():
    return {r.name: r for r in run_criteria(printer=print)}


@pytest.mark.parametrize("name", [name for name, _ in CRITERIA])
def test_criterion(results, name):
    res = results[name]
    assert res.passed, f"{res.name}: {res.measured} (threshold: {res.threshold})"
    budget = RUNTIME_BUDGETS.get(name)
    if budget is not None:
        assert res.seconds < budget, f"{res.name} took {res.seconds:.1f}s"


def test_filter_selects_subset():
    subset = run_criteria(name_filter="sphere", printer=None)
    assert [r.name for r in subset] == ["10 blowdown: sphere identity"]
    assert subset[0].passed


def test_filter_constants_runs_only_constants():
    subset = run_criteria(name_filter="constants", printer=None)
    assert [r.name for r in subset] == ["1 constants: exponent identities"]
