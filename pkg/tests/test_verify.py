# tests/test_verify.py

import math

import pytest

from rscavity.api.verify import cmd_increment, cmd_verify, gaps_shrinking
from rscavity.models.exact import IncrementReport


def test_gaps_shrinking_strict_decrease():
    assert gaps_shrinking([(0.10, 0.01), (0.06, 0.01), (0.03, 0.01)])


def test_gaps_shrinking_tolerates_noise():
    # 0.06 <= 0.05 + 2·hypot(0.02, 0.02)
    assert gaps_shrinking([(0.05, 0.02), (0.06, 0.02)])


def test_gaps_growing_beyond_noise():
    assert not gaps_shrinking([(0.02, 0.001), (0.10, 0.001)])


def test_gaps_shrinking_trivial_trends():
    assert gaps_shrinking([])
    assert gaps_shrinking([(0.3, 0.0)])


def test_verify_small_run():
    report = cmd_verify(1.0, 3, 8, samples=10, size=2000, iters=3, mc=2000, seed=0, trend_ns=(6, 8), threads=2)
    assert [row["n"] for row in report["trend"]] == [6, 8]
    last = report["trend"][-1]
    assert last["mean"] == report["exact_mean"]
    assert report["gap"] == pytest.approx(report["exact_mean"] - report["bethe"])
    assert last["gap"] == pytest.approx(report["gap"])
    assert isinstance(report["gap_shrinking"], bool)
    assert 0 <= report["satisfiable_rate"] <= 1


def test_increment_small_run():
    report = cmd_increment(1.0, 3, 6, samples=6, size=2000, iters=3, mc=2000, seed=1, threads=2)
    assert isinstance(report["increment"], IncrementReport)
    assert report["increment"].samples == 6
    assert math.isfinite(report["z_score"])


@pytest.mark.slow
def test_verify_gap_at_desk_scale():
    report = cmd_verify(1.0, 3, 20, samples=200, size=100_000, iters=25, mc=100_000, seed=0,
                        trend_ns=(12, 16, 20))
    assert abs(report["gap"]) < 0.05
    assert report["gap_shrinking"]


@pytest.mark.slow
def test_increment_within_three_std_errors():
    report = cmd_increment(1.0, 3, 18, samples=200, size=100_000, iters=25, mc=100_000, seed=0)
    assert abs(report["z_score"]) < 3
