# rscavity/models/population.py

"""
Population dynamics for the Belief Propagation operator BP_{d,k}.

A ``Population`` is a fixed-size sample representing a distribution on
an interval. ``bp_step`` resamples it through one application of the
operator:

    μ̂ = Π_{d⁻} μ_i / (Π_{d⁻} μ_i + Π_{d⁺} μ_i),   μ_i = 1 − Π_{j<k} μ_{i,j}

with d⁻, d⁺ ~ Po(d/2), evaluated in log space. Outputs are clamped into
[1e−300, largest double below 1]; 1 − 1e−300 rounds to 1.0, so the
upper clamp is the next float down instead.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.special import expit

from ..utils.errors import InputError, ParseError
from ..utils.parallel import chunked_samples
from ..utils.rng import Key, sample_poisson

EPS = 1e-300
ONE_MINUS = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True, eq=False)
class Population:
    samples: np.ndarray
    low: float = 0.0
    high: float = 1.0
    low_open: bool = True
    high_open: bool = True

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.float64).reshape(-1)
        if samples.size < 1:
            raise InputError("a population needs at least one sample")
        if np.isnan(samples).any():
            raise InputError("population contains NaN")
        lo_ok = samples > self.low if self.low_open else samples >= self.low
        hi_ok = samples < self.high if self.high_open else samples <= self.high
        if not (lo_ok & hi_ok).all():
            bad = samples[~(lo_ok & hi_ok)][0]
            raise InputError(f"sample {bad!r} outside declared support {self.support_str()}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    # ── Construction ──────────────────────────────────────────────────

    @classmethod
    def constant(cls, value: float, size: int, **support) -> "Population":
        return cls(np.full(size, value, dtype=np.float64), **support)

    def with_samples(self, samples: np.ndarray) -> "Population":
        """Same support, new samples."""
        return Population(samples, self.low, self.high, self.low_open, self.high_open)

    def sorted(self) -> "Population":
        return self.with_samples(np.sort(self.samples))

    def flipped(self) -> "Population":
        """Push-forward under x ↦ 1 − x (for populations on (0,1))."""
        return self.with_samples(1.0 - self.samples)

    # ── Statistics ────────────────────────────────────────────────────

    @property
    def size(self) -> int:
        return int(self.samples.size)

    def mean(self) -> float:
        return float(self.samples.mean())

    def std_error(self) -> float:
        if self.size < 2:
            return 0.0
        return float(self.samples.std(ddof=1) / math.sqrt(self.size))

    def support_str(self) -> str:
        return f"{'(' if self.low_open else '['}{self.low}, {self.high}{')' if self.high_open else ']'}"

    # ── Persistence ───────────────────────────────────────────────────

    def save(self, path: Union[str, Path], **meta) -> Path:
        """Raw little-endian float64 dump plus a ``<path>.json`` sidecar."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.samples.astype("<f8").tofile(path)
        sidecar = {
            "size": self.size,
            "dtype": "<f8",
            "support": [self.low, self.high, self.low_open, self.high_open],
            **meta,
        }
        with open(_sidecar(path), "w", encoding="utf-8") as f:
            json.dump(sidecar, f, indent=2, sort_keys=True, default=str)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Population":
        path = Path(path)
        samples = np.fromfile(path, dtype="<f8")
        support = [0.0, 1.0, True, True]
        meta_path = _sidecar(path)
        if meta_path.exists():
            with open(meta_path, encoding="utf-8") as f:
                meta = json.load(f)
            if meta.get("size", samples.size) != samples.size:
                raise ParseError(f"{path.name}: sidecar says {meta['size']} samples, file holds {samples.size}")
            support = meta.get("support", support)
        low, high, low_open, high_open = support
        return cls(samples, float(low), float(high), bool(low_open), bool(high_open))


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


@dataclass
class IterationResult:
    population: Population
    w1_trace: List[float] = field(default_factory=list)

    @property
    def cauchy(self) -> bool:
        """False when the last W₁ step is larger than the first one."""
        return not self.w1_trace or self.w1_trace[-1] <= self.w1_trace[0]


# ── Operator ─────────────────────────────────────────────────────────

def clause_log_messages(log_mu: np.ndarray) -> np.ndarray:
    """log(1 − Π_j μ_j) per row of log μ values."""
    with np.errstate(divide="ignore"):
        return np.log(-np.expm1(log_mu.sum(axis=1)))


def bp_value(minus_clauses: np.ndarray, plus_clauses: np.ndarray) -> float:
    """
    One BP output from explicit inputs: each row holds the k−1 incoming μ's
    of one clause, ``minus_clauses`` for the d⁻ clauses, ``plus_clauses``
    for the d⁺ ones.
    """
    s_minus = clause_log_messages(np.log(np.atleast_2d(minus_clauses))).sum() if np.size(minus_clauses) else 0.0
    s_plus = clause_log_messages(np.log(np.atleast_2d(plus_clauses))).sum() if np.size(plus_clauses) else 0.0
    return float(np.clip(expit(s_minus - s_plus), EPS, ONE_MINUS))


def split_sums(values: np.ndarray, minus: np.ndarray, plus: np.ndarray, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-owner sums of ``values`` over the first d⁻ and the next d⁺ entries of each owner."""
    per_owner = minus + plus
    owner = np.repeat(np.arange(size), per_owner)
    offset = np.arange(owner.size) - np.repeat(np.cumsum(per_owner) - per_owner, per_owner)
    is_minus = offset < np.repeat(minus, per_owner)
    s_minus = np.bincount(owner[is_minus], weights=values[is_minus], minlength=size)
    s_plus = np.bincount(owner[~is_minus], weights=values[~is_minus], minlength=size)
    return s_minus, s_plus


def _bp_chunk(log_pop: np.ndarray, d: float, k: int):
    def run(rng: np.random.Generator, size: int) -> np.ndarray:
        minus = sample_poisson(rng, d / 2, size)
        plus = sample_poisson(rng, d / 2, size)
        clauses = int(minus.sum() + plus.sum())
        draws = rng.integers(0, log_pop.size, size=clauses * (k - 1))
        messages = clause_log_messages(log_pop[draws].reshape(clauses, k - 1))
        s_minus, s_plus = split_sums(messages, minus, plus, size)
        return np.clip(expit(s_minus - s_plus), EPS, ONE_MINUS)
    return run


def bp_step(
    pop: Population,
    d: float,
    k: int,
    size: int,
    seed: int,
    stream: Tuple[Key, ...] = (),
    threads: Optional[int] = None,
) -> Population:
    """``size`` fresh samples of BP_{d,k}(pop)."""
    _check(d, k, size)
    log_pop = np.log(pop.samples)
    samples = chunked_samples(size, seed, ("bp",) + tuple(stream), _bp_chunk(log_pop, d, k), threads)
    return Population(samples)


def iterate(
    d: float,
    k: int,
    size: int,
    iters: int,
    seed: int,
    threads: Optional[int] = None,
) -> IterationResult:
    """BP_{d,k}^iters(δ_{1/2}) with the W₁ distance between consecutive iterates."""
    if iters < 0:
        raise InputError(f"iters must be non-negative, got {iters}")
    _check(d, k, size)
    pop = Population.constant(0.5, size)
    trace: List[float] = []
    for t in range(iters):
        nxt = bp_step(pop, d, k, size, seed, stream=("iterate", t), threads=threads)
        trace.append(w1(pop, nxt))
        pop = nxt
    return IterationResult(pop, trace)


def _check(d: float, k: int, size: int) -> None:
    if d < 0 or not np.isfinite(d):
        raise InputError(f"density d must be finite and non-negative, got {d}")
    if k < 2:
        raise InputError(f"clause width k must be at least 2, got {k}")
    if size < 1:
        raise InputError(f"population size must be positive, got {size}")


# ── Wasserstein ──────────────────────────────────────────────────────

def quantile_resample(sorted_samples: np.ndarray, size: int) -> np.ndarray:
    """Evenly spaced order statistics, so unequal populations can be paired."""
    idx = ((np.arange(size) + 0.5) * sorted_samples.size / size).astype(np.int64)
    return sorted_samples[np.minimum(idx, sorted_samples.size - 1)]


def sorted_w1(a: np.ndarray, b: np.ndarray) -> float:
    """W₁ between two empirical measures on the line given as sample arrays."""
    sa, sb = np.sort(a), np.sort(b)
    if sa.size != sb.size:
        if sa.size > sb.size:
            sa = quantile_resample(sa, sb.size)
        else:
            sb = quantile_resample(sb, sa.size)
    with np.errstate(invalid="ignore"):
        diff = np.where(sa == sb, 0.0, np.abs(sa - sb))
    return float(diff.mean())


def w1(a: Population, b: Population) -> float:
    return sorted_w1(a.samples, b.samples)
