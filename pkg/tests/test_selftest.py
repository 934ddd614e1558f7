# tests/test_selftest.py

import pytest

from rscavity.api import selftest
from rscavity.api.selftest import TABLE1_REFERENCE, cmd_selftest
from rscavity.models import typed_operator


def test_table1_check_passes_on_reference():
    passed, detail = selftest._table1(TABLE1_REFERENCE)(0)
    assert passed, detail


def test_table1_check_names_a_wrong_constant():
    wrong = {3: (0.5, 0.8792, 1.3431, 5.0)}
    passed, detail = selftest._table1(wrong)(0)
    assert not passed
    assert "d_pure(k=3)" in detail


@pytest.mark.parametrize("check", ["_identities", "_exact_oracles", "_height_tail", "_determinism"])
def test_fast_checks_pass(check):
    passed, detail = getattr(selftest, check)(0)
    assert passed, detail


def test_contraction_check_fails_when_every_trial_is_skipped(monkeypatch):
    monkeypatch.setattr(typed_operator, "dist_metric", lambda *args, **kwargs: 0.0)
    passed, detail = selftest._contraction(0)
    assert not passed
    assert "skipped" in detail


@pytest.mark.slow
def test_reference_override_fails_only_that_check():
    wrong = dict(TABLE1_REFERENCE)
    wrong[4] = (0.3333, 0.8695, 1.2451, 6.0)
    report = cmd_selftest(0, wrong)
    assert report["failed"] == ["table1_constants"]


@pytest.mark.slow
def test_same_seed_same_digest():
    first, second = cmd_selftest(0), cmd_selftest(0)
    assert first["passed"], first["failed"]
    assert first["digest"] == second["digest"]
