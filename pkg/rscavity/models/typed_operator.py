# rscavity/models/typed_operator.py

"""
The typed log-likelihood operator LL⋆ on triplets (ρ•, ρ⊕, ρ⊖) of
populations, its untyped counterpart LL⁺, the dist_t metric and the
coupled contraction estimate.

Variables below a clause are typed • (both signs below it), ⊕ (only
positive), ⊖ (only negative) or ○ (childless) with probabilities

    p• = (1 − q)²,  p⊕ = p⊖ = q(1 − q),  p○ = q²,   q = e^{−d/2}.

A clause with type counts r and sign ε contributes

    log Ξ = log(1 − 2^{−r○} · Π_{typed children} expit(ε·η))

and the three outputs are

    ρ̂• = −Σ_{Po⁺(d/2)} log Ξ(+1) + Σ_{Po⁺(d/2)} log Ξ(−1)
    ρ̂⊕ = −Σ_{Po⁺(d/2)} log Ξ(+1)
    ρ̂⊖ = +Σ_{Po⁺(d/2)} log Ξ(−1)
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.special import log_expit

from ..utils.config import get_settings
from ..utils.errors import InputError, InvariantError
from ..utils.parallel import chunked_samples, map_ordered
from ..utils.rng import Key, sample_poisson, sample_positive_poisson, substream
from .population import Population, sorted_w1, split_sums
from .thresholds import g_con

LOG2 = math.log(2.0)
TINY = float(np.finfo(np.float64).tiny)
HUGE = float(np.finfo(np.float64).max)

ALL, PLUS, MINUS = 0, 1, 2


def _support_all() -> dict:
    return dict(low=-math.inf, high=math.inf, low_open=True, high_open=False)


@dataclass(frozen=True)
class TypedTriplet:
    """ρ• on (−∞,∞], ρ⊕ on (0,∞], ρ⊖ on (−∞,0]."""

    rho_all: Population
    rho_plus: Population
    rho_minus: Population

    def __post_init__(self):
        expected = [
            (self.rho_all, (-math.inf, math.inf, True, False)),
            (self.rho_plus, (0.0, math.inf, True, False)),
            (self.rho_minus, (-math.inf, 0.0, True, False)),
        ]
        for pop, (low, high, low_open, high_open) in expected:
            if (pop.low, pop.high, pop.low_open, pop.high_open) != (low, high, low_open, high_open):
                raise InputError(f"triplet coordinate has support {pop.support_str()}")

    @classmethod
    def from_arrays(cls, rho_all, rho_plus, rho_minus) -> "TypedTriplet":
        """Clamp raw samples into the three supports."""
        rho_all = np.maximum(np.asarray(rho_all, dtype=np.float64), -HUGE)
        rho_plus = np.maximum(np.asarray(rho_plus, dtype=np.float64), TINY)
        rho_minus = np.clip(np.asarray(rho_minus, dtype=np.float64), -HUGE, 0.0)
        return cls(
            Population(rho_all, **_support_all()),
            Population(rho_plus, low=0.0, high=math.inf, low_open=True, high_open=False),
            Population(rho_minus, low=-math.inf, high=0.0, low_open=True, high_open=False),
        )

    @classmethod
    def initial(cls, size: int) -> "TypedTriplet":
        return cls.from_arrays(np.zeros(size), np.full(size, TINY), np.zeros(size))

    def coordinates(self) -> Tuple[Population, Population, Population]:
        return self.rho_all, self.rho_plus, self.rho_minus

    def sorted(self) -> "TypedTriplet":
        return TypedTriplet(*(pop.sorted() for pop in self.coordinates()))

    @property
    def sizes(self) -> Tuple[int, int, int]:
        return tuple(pop.size for pop in self.coordinates())


def type_probabilities(d: float) -> Tuple[float, float, float, float]:
    """(p•, p⊕, p⊖, p○)."""
    if d < 0:
        raise InputError(f"density d must be non-negative, got {d}")
    q = math.exp(-d / 2)
    return (1 - q) ** 2, q * (1 - q), q * (1 - q), q * q


def _log_xi(
    rng: np.random.Generator,
    pops: Sequence[np.ndarray],
    eps: np.ndarray,
    k: int,
    probs: Tuple[float, float, float, float],
) -> np.ndarray:
    """log Ξ for one clause per entry of ``eps``."""
    clauses = eps.size
    types = rng.multinomial(k - 1, probs, size=clauses)
    total = -LOG2 * types[:, 3].astype(np.float64)
    for t in (ALL, PLUS, MINUS):
        per_clause = types[:, t]
        draws = int(per_clause.sum())
        if draws == 0:
            continue
        values = pops[t][rng.integers(0, pops[t].size, size=draws)]
        owner = np.repeat(np.arange(clauses), per_clause)
        total += np.bincount(owner, weights=log_expit(eps[owner] * values), minlength=clauses)
    with np.errstate(divide="ignore"):
        return np.log(-np.expm1(total))


def _ll_star_chunk(pops: Sequence[np.ndarray], d: float, k: int, output: int):
    probs = type_probabilities(d)

    def run(rng: np.random.Generator, size: int) -> np.ndarray:
        if output == ALL:
            first = sample_positive_poisson(rng, d / 2, size)
            second = sample_positive_poisson(rng, d / 2, size)
        else:
            first = sample_positive_poisson(rng, d / 2, size)
            second = np.zeros(size, dtype=np.int64)
        if output == MINUS:
            first, second = second, first
        per_owner = first + second
        offset = np.arange(per_owner.sum()) - np.repeat(np.cumsum(per_owner) - per_owner, per_owner)
        eps = np.where(offset < np.repeat(first, per_owner), 1.0, -1.0)
        log_xi = _log_xi(rng, pops, eps, k, probs)
        s_pos, s_neg = split_sums(log_xi, first, second, size)
        if output == ALL:
            return -s_pos + np.maximum(s_neg, -HUGE)
        if output == PLUS:
            return np.maximum(-s_pos, TINY)
        return np.clip(s_neg, -HUGE, 0.0)
    return run


def ll_star_step(
    triplet: TypedTriplet,
    d: float,
    k: int,
    size: int,
    seed: int,
    stream: Tuple[Key, ...] = (),
    threads: Optional[int] = None,
) -> TypedTriplet:
    """
    ``size`` samples of each coordinate of LL⋆_{k,d}(triplet).

    All randomness is keyed by (seed, stream) and the input sizes, so two
    sorted inputs of equal sizes see identical clause counts, types and
    sample indices.
    """
    if not d > 0 or not math.isfinite(d):
        raise InputError(f"LL⋆ needs a finite positive density, got {d}")
    if k < 2 or size < 1:
        raise InputError("need k >= 2 and size >= 1")
    pops = [pop.samples for pop in triplet.coordinates()]
    outputs = [
        chunked_samples(size, seed, ("llstar",) + tuple(stream) + (name,), _ll_star_chunk(pops, d, k, which), threads)
        for which, name in ((ALL, "all"), (PLUS, "plus"), (MINUS, "minus"))
    ]
    return TypedTriplet.from_arrays(*outputs)


def ll_plus_step(
    pop: Population,
    d: float,
    k: int,
    size: int,
    seed: int,
    stream: Tuple[Key, ...] = (),
    threads: Optional[int] = None,
) -> Population:
    """
    The untyped operator: −Σ_{i ≤ Po(d)} s_i·log(1 − Γ(s_i·η_{i,1..k−1}))
    with uniform signs s_i.
    """
    if d < 0 or not math.isfinite(d):
        raise InputError(f"density d must be finite and non-negative, got {d}")
    samples = pop.samples

    def run(rng: np.random.Generator, n: int) -> np.ndarray:
        counts = sample_poisson(rng, d, n)
        clauses = int(counts.sum())
        signs = rng.integers(0, 2, size=clauses) * 2.0 - 1.0
        values = samples[rng.integers(0, samples.size, size=clauses * (k - 1))].reshape(clauses, k - 1)
        log_g = log_expit(signs[:, None] * values).sum(axis=1)
        with np.errstate(divide="ignore"):
            terms = -signs * np.log(-np.expm1(log_g))
        owner = np.repeat(np.arange(n), counts)
        with np.errstate(invalid="ignore"):
            out = np.bincount(owner, weights=terms, minlength=n)
        if np.isnan(out).any():
            raise InvariantError("indeterminate ∞ − ∞ in LL⁺ sample")
        return np.maximum(out, -HUGE)

    out = chunked_samples(size, seed, ("llplus",) + tuple(stream), run, threads)
    return Population(out, **_support_all())


# ── Metric ───────────────────────────────────────────────────────────

def dist_weights(t: float) -> Tuple[float, float, float]:
    q = math.exp(-t / 2)
    return 1 - q, q, q


def dist_metric(a: TypedTriplet, b: TypedTriplet, t: float, truncation: Optional[float] = None) -> float:
    """Weighted coordinatewise W₁, samples clipped to [−M, M] first."""
    cap = truncation if truncation is not None else get_settings().truncation
    total = 0.0
    for weight, pa, pb in zip(dist_weights(t), a.coordinates(), b.coordinates()):
        if weight == 0:
            continue
        total += weight * sorted_w1(np.clip(pa.samples, -cap, cap), np.clip(pb.samples, -cap, cap))
    return total


@dataclass
class TripletIteration:
    triplet: TypedTriplet
    dist_trace: List[float] = field(default_factory=list)


def ll_star_iterate(
    d: float,
    k: int,
    size: int,
    iters: int,
    seed: int,
    truncation: Optional[float] = None,
    threads: Optional[int] = None,
) -> TripletIteration:
    """LL⋆ iterated from (δ₀, δ_tiny, δ₀), with dist_d between consecutive iterates."""
    if iters < 0:
        raise InputError(f"iters must be non-negative, got {iters}")
    current = TypedTriplet.initial(size)
    trace: List[float] = []
    for t in range(iters):
        nxt = ll_star_step(current, d, k, size, seed, stream=("iterate", t), threads=threads)
        trace.append(dist_metric(current, nxt, d, truncation))
        current = nxt
    return TripletIteration(current, trace)


# ── Contraction ──────────────────────────────────────────────────────

class ContractionReport(BaseModel):
    d: float
    k: int
    size: int
    trials: int
    empirical_ratio: Optional[float]  # None when every trial was skipped
    constant: float
    ratios: List[float]
    skipped: int
    truncation: float


def random_triplet(rng: np.random.Generator, size: int) -> TypedTriplet:
    """Laplace ρ•, shifted-exponential ρ⊕ and mirrored ρ⊖, with random location and scale."""
    loc, scale = rng.normal(0.0, 1.0), rng.uniform(0.5, 3.0)
    shift_plus, scale_plus = rng.uniform(0.0, 1.0), rng.uniform(0.5, 3.0)
    shift_minus, scale_minus = rng.uniform(0.0, 1.0), rng.uniform(0.5, 3.0)
    return TypedTriplet.from_arrays(
        rng.laplace(loc, scale, size),
        shift_plus + rng.exponential(scale_plus, size),
        -(shift_minus + rng.exponential(scale_minus, size)),
    )


def contraction_estimate(
    d: float,
    k: int,
    size: int,
    trials: int,
    seed: int,
    truncation: Optional[float] = None,
    threads: Optional[int] = None,
) -> ContractionReport:
    """
    max over trials of dist_d(LL⋆ρ, LL⋆ρ′) / dist_d(ρ, ρ′) for random pairs,
    next to (d(k−1)/2)(1 − e^{−d/2}/2)^{k−2}. Inputs are sorted and both
    images use the same randomness, which pairs samples monotonically.
    """
    if trials < 1:
        raise InputError("need at least one trial")
    cap = truncation if truncation is not None else get_settings().truncation

    def one(trial: int) -> Optional[float]:
        a = random_triplet(substream(seed, "contraction-input", trial, 0), size).sorted()
        b = random_triplet(substream(seed, "contraction-input", trial, 1), size).sorted()
        before = dist_metric(a, b, d, cap)
        if before == 0:
            return None
        out_a = ll_star_step(a, d, k, size, seed, stream=("contraction", trial), threads=1)
        out_b = ll_star_step(b, d, k, size, seed, stream=("contraction", trial), threads=1)
        return dist_metric(out_a, out_b, d, cap) / before

    results = map_ordered(one, range(trials), threads)
    ratios = [r for r in results if r is not None]
    return ContractionReport(
        d=d,
        k=k,
        size=size,
        trials=trials,
        empirical_ratio=max(ratios) if ratios else None,
        constant=g_con(d, k),
        ratios=ratios,
        skipped=len(results) - len(ratios),
        truncation=cap,
    )
