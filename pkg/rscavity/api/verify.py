# rscavity/api/verify.py

"""Finite-n checks of the Bethe prediction against exact counts."""

import math
from typing import Dict, List, Optional, Sequence, Tuple

from ..models.bethe import BetheEstimate, bethe
from ..models.exact import log_count_experiment, rs_increment_experiment
from ..models.population import iterate

SHRINK_SIGMAS = 2.0


def bethe_reference(
    d: float,
    k: int,
    size: int,
    iters: int,
    mc: int,
    seed: int,
    threads: Optional[int] = None,
) -> BetheEstimate:
    pop = iterate(d, k, size, iters, seed, threads=threads).population
    return bethe(pop, d, k, mc, seed, threads=threads)


def gaps_shrinking(gaps: Sequence[Tuple[float, float]], sigmas: float = SHRINK_SIGMAS) -> bool:
    """``gaps`` is a list of (|gap|, std_error) in increasing n."""
    return all(
        b <= a + sigmas * math.hypot(se_a, se_b)
        for (a, se_a), (b, se_b) in zip(gaps, gaps[1:])
    )


def cmd_verify(
    d: float,
    k: int,
    n: int,
    samples: int,
    size: int,
    iters: int,
    mc: int,
    seed: int,
    trend_ns: Sequence[int] = (12, 16, 20),
    cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> Dict:
    """
    Mean of (1/n)·log(Z∨1) over exact-counted formulas against the Bethe
    estimate, plus the gap at each n of ``trend_ns``.

    ``gap_shrinking`` holds when no |gap| grows past its predecessor by more
    than ``SHRINK_SIGMAS`` combined standard errors of the two means. The
    Bethe value is shared by every row, so its error cancels.
    """
    reference = bethe_reference(d, k, size, iters, mc, seed, threads)
    main = log_count_experiment(d, k, n, samples, seed, cap, threads)

    trend: List[Dict] = []
    for m in sorted(set(trend_ns)):
        report = main if m == n else log_count_experiment(d, k, m, samples, seed, cap, threads)
        trend.append({
            "n":         m,
            "mean":      report.mean,
            "std_error": report.std_error,
            "gap":       report.mean - reference.value,
        })
    gaps = [(abs(row["gap"]), row["std_error"]) for row in trend]
    return {
        "d":                d,
        "k":                k,
        "n":                n,
        "samples":          samples,
        "exact_mean":       main.mean,
        "exact_std_error":  main.std_error,
        "satisfiable_rate": main.satisfiable_rate,
        "bethe":            reference.value,
        "bethe_std_error":  reference.std_error,
        "gap":              main.mean - reference.value,
        "trend":            trend,
        "gap_shrinking":    gaps_shrinking(gaps),
    }


def cmd_increment(
    d: float,
    k: int,
    n: int,
    samples: int,
    size: int,
    iters: int,
    mc: int,
    seed: int,
    cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> Dict:
    reference = bethe_reference(d, k, size, iters, mc, seed, threads)
    report = rs_increment_experiment(d, k, n, samples, seed, cap, threads)
    spread = math.hypot(report.std_error, reference.std_error)
    return {
        "d":               d,
        "k":               k,
        "n":               n,
        "increment":       report,
        "bethe":           reference.value,
        "bethe_std_error": reference.std_error,
        "z_score":         (report.mean - reference.value) / spread if spread > 0 else 0.0,
    }
