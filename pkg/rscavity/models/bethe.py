# rscavity/models/bethe.py

import math
from typing import Callable, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from ..utils.errors import InputError
from ..utils.parallel import chunked_map
from ..utils.rng import Key, sample_poisson
from .population import Population, split_sums, clause_log_messages


class BetheEstimate(BaseModel):
    """value = variable_term − (d(k−1)/k)·clause_term, with its Monte Carlo error."""

    value: float
    std_error: float
    mc_samples: int
    clause_term: float
    variable_term: float
    degenerate: int = 0
    beta: Optional[float] = None


ClauseLog = Callable[[np.ndarray], np.ndarray]


def _soft_clause_log(beta: float) -> ClauseLog:
    """log(1 − (1 − e^{−β})·Π_j μ_j) per row of log μ values."""
    scale = math.expm1(-beta)

    def run(log_mu: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log1p(scale * np.exp(log_mu.sum(axis=1)))
    return run


def _terms_chunk(log_pop: np.ndarray, d: float, k: int, clause_log: ClauseLog):
    def run(rng: np.random.Generator, size: int) -> np.ndarray:
        minus = sample_poisson(rng, d / 2, size)
        plus = sample_poisson(rng, d / 2, size)
        clauses = int(minus.sum() + plus.sum())
        draws = rng.integers(0, log_pop.size, size=clauses * (k - 1))
        messages = clause_log(log_pop[draws].reshape(clauses, k - 1))
        s_minus, s_plus = split_sums(messages, minus, plus, size)
        variable = np.logaddexp(s_minus, s_plus)
        full = rng.integers(0, log_pop.size, size=size * k)
        clause = clause_log(log_pop[full].reshape(size, k))
        return np.stack([variable, clause])
    return run


def _estimate(
    pop: Population,
    d: float,
    k: int,
    mc_samples: int,
    seed: int,
    clause_log: ClauseLog,
    stream: Tuple[Key, ...],
    threads: Optional[int],
    beta: Optional[float] = None,
) -> BetheEstimate:
    if d < 0 or not np.isfinite(d):
        raise InputError(f"density d must be finite and non-negative, got {d}")
    if k < 2:
        raise InputError(f"clause width k must be at least 2, got {k}")
    if mc_samples < 1:
        raise InputError(f"mc_samples must be positive, got {mc_samples}")

    log_pop = np.log(pop.samples)
    parts = chunked_map(mc_samples, seed, ("bethe",) + tuple(stream), _terms_chunk(log_pop, d, k, clause_log), threads)
    variable, clause = np.concatenate(parts, axis=1)

    ok = np.isfinite(clause)
    degenerate = int(ok.size - ok.sum())
    if not ok.any():
        raise InputError("every clause-term sample is degenerate (Π μ = 1)")
    variable, clause = variable[ok], clause[ok]
    coeff = d * (k - 1) / k
    y = variable - coeff * clause
    return BetheEstimate(
        value=float(y.mean()),
        std_error=float(y.std(ddof=1) / math.sqrt(y.size)) if y.size > 1 else 0.0,
        mc_samples=int(y.size),
        clause_term=float(clause.mean()),
        variable_term=float(variable.mean()),
        degenerate=degenerate,
        beta=beta,
    )


# ── Public API ───────────────────────────────────────────────────────

def bethe(
    pop: Population,
    d: float,
    k: int,
    mc_samples: int,
    seed: int,
    stream: Tuple[Key, ...] = (),
    threads: Optional[int] = None,
) -> BetheEstimate:
    """
    𝔅_{d,k}(π) = E[log(Π_{d⁻} μ + Π_{d⁺} μ)] − (d(k−1)/k)·E[log(1 − Π_{j≤k} μ_j)]

    Clause-term samples that evaluate to log 0 are counted in
    ``degenerate`` and left out of both averages.
    """
    return _estimate(pop, d, k, mc_samples, seed, clause_log_messages, stream, threads)


def bethe_beta(
    pop: Population,
    d: float,
    k: int,
    beta: float,
    mc_samples: int,
    seed: int,
    stream: Tuple[Key, ...] = (),
    threads: Optional[int] = None,
) -> BetheEstimate:
    """
    The finite-β interpolation functional: ``bethe`` with every clause
    message 1 − Π μ replaced by 1 − (1 − e^{−β})·Π μ. Draws are shared
    with ``bethe`` under the same seed, so estimates at different β are
    paired.
    """
    if not beta > 0:
        raise InputError(f"beta must be positive, got {beta}")
    return _estimate(pop, d, k, mc_samples, seed, _soft_clause_log(beta), stream, threads, beta=beta)
