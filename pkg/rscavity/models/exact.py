# rscavity/models/exact.py

"""
Exact oracles: Z(Φ), Z(Φ,ℒ), Z_β(Φ) and variable marginals.

The formula is split into connected components of its factor graph with
union-find. Each component is enumerated exhaustively: up to 16 "low"
variables are tabulated with numpy over all their assignments, the
remaining "high" variables are walked in Gray-code order with
incremental per-clause counters of true literals. One pass yields the
histogram of violated-clause counts (which gives Z and Z_β) and, per
variable, the number of satisfying assignments setting it to 1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.special import logsumexp

from ..core.cnf import Formula, Literal, assign_all, check_consistent
from ..core.generator import sample_coupling, sample_formula
from ..utils.config import get_settings
from ..utils.errors import InputError, ResourceCapError, UnsatisfiableError
from ..utils.parallel import map_ordered
from .population import Population

LOW_BITS = 16
LOG2 = math.log(2.0)


class CountResult(BaseModel):
    count: int
    log_count: float
    components: List[int] = []

    def to_json_dict(self) -> Dict:
        return {"count": str(self.count), "log_count": self.log_count, "components": self.components}


@dataclass(frozen=True)
class MarginalVector:
    """P[σ(x)=1] per variable, exact; index ``var - 1``."""

    exact: Tuple[Fraction, ...]

    def __getitem__(self, var: int) -> Fraction:
        return self.exact[var - 1]

    def __len__(self) -> int:
        return len(self.exact)

    def floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.exact], dtype=np.float64)


class IncrementReport(BaseModel):
    mean: float
    std_error: float
    samples: int
    unsat_extended: int
    unsat_augmented: int
    above_log2: int


class LogCountReport(BaseModel):
    n: int
    mean: float
    std_error: float
    samples: int
    satisfiable_rate: float


# ── Enumeration engine ───────────────────────────────────────────────

@dataclass
class _Component:
    variables: List[int]
    clause_count: int
    hist: np.ndarray    # hist[v] = #assignments violating exactly v clauses
    ones: np.ndarray    # ones[j] = #satisfying assignments with variables[j] = 1


@dataclass
class _Analysis:
    isolated: List[int]
    empty_clauses: int
    components: List[_Component]

    @property
    def count(self) -> int:
        if self.empty_clauses:
            return 0
        z = 1 << len(self.isolated)
        for comp in self.components:
            z *= int(comp.hist[0])
        return z

    def log_soft(self, beta: float) -> float:
        total = len(self.isolated) * LOG2 - beta * self.empty_clauses
        for comp in self.components:
            v = np.arange(comp.hist.size, dtype=np.float64)
            total += float(logsumexp(-beta * v, b=comp.hist.astype(np.float64)))
        return total


def _components(formula: Formula, exclude: FrozenSet[int]) -> Tuple[List[int], List[Tuple[List[int], List[int]]]]:
    """(isolated free variables, [(component variables, component clause indices)])."""
    parent = list(range(formula.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        parent[find(x)] = find(y)

    used = set()
    for clause in formula.clauses:
        vs = clause.variables
        used.update(vs)
        for v in vs[1:]:
            union(vs[0], v)

    groups: Dict[int, Tuple[List[int], List[int]]] = {}
    for v in sorted(used):
        groups.setdefault(find(v), ([], []))[0].append(v)
    for index, clause in enumerate(formula.clauses):
        if len(clause):
            groups[find(clause.variables[0])][1].append(index)

    isolated = [v for v in range(1, formula.n + 1) if v not in used and v not in exclude]
    return isolated, sorted(groups.values(), key=lambda g: g[0][0])


def _enumerate(formula: Formula, variables: List[int], clause_ids: List[int]) -> _Component:
    local = {v: j for j, v in enumerate(variables)}
    size = len(variables)
    low = min(size, LOW_BITS)
    high = size - low
    n_clauses = len(clause_ids)

    assignments = np.arange(1 << low, dtype=np.int64)
    bits = ((assignments[None, :] >> np.arange(low, dtype=np.int64)[:, None]) & 1).astype(bool)

    low_sat = np.zeros((n_clauses, 1 << low), dtype=bool)
    counters = np.zeros(n_clauses, dtype=np.int64)
    incidence: List[List[Tuple[int, int]]] = [[] for _ in range(high)]
    for c, index in enumerate(clause_ids):
        for lit in formula.clauses[index]:
            j = local[lit.var]
            if j < low:
                low_sat[c] |= bits[j] if lit.sign > 0 else ~bits[j]
            else:
                incidence[j - low].append((c, lit.sign))
                if lit.sign < 0:
                    counters[c] += 1    # high bits start at 0, so negative literals start true

    hist = np.zeros(n_clauses + 1, dtype=np.int64)
    ones_low = np.zeros(low, dtype=np.int64)
    ones_high = np.zeros(high, dtype=np.int64)
    high_bits = np.zeros(high, dtype=np.int64)
    memo: Dict[bytes, Tuple[np.ndarray, np.ndarray]] = {}

    for step in range(1 << high):
        unsat = counters == 0
        key = unsat.tobytes()
        if key not in memo:
            violated = (~low_sat[unsat]).sum(axis=0) if unsat.any() else np.zeros(1 << low, dtype=np.int64)
            pattern_hist = np.bincount(violated, minlength=n_clauses + 1)
            pattern_ones = bits[:, violated == 0].sum(axis=1)
            memo[key] = (pattern_hist, pattern_ones)
        pattern_hist, pattern_ones = memo[key]
        hist += pattern_hist
        ones_low += pattern_ones
        if high:
            ones_high += pattern_hist[0] * high_bits
            if step + 1 < (1 << high):
                j = ((step + 1) & -(step + 1)).bit_length() - 1
                high_bits[j] ^= 1
                delta = 1 if high_bits[j] else -1
                for c, sign in incidence[j]:
                    counters[c] += delta if sign > 0 else -delta

    return _Component(
        variables=variables,
        clause_count=n_clauses,
        hist=hist,
        ones=np.concatenate([ones_low, ones_high]),
    )


def _analyse(formula: Formula, cap: Optional[int] = None, exclude: Iterable[int] = ()) -> _Analysis:
    cap = cap if cap is not None else get_settings().component_cap
    exclude = frozenset(exclude)
    isolated, groups = _components(formula, exclude)
    for variables, _ in groups:
        if len(variables) > cap:
            raise ResourceCapError("connected component", len(variables), cap)
    empty = sum(1 for clause in formula.clauses if not len(clause))
    return _Analysis(
        isolated=isolated,
        empty_clauses=empty,
        components=[_enumerate(formula, vs, cs) for vs, cs in groups],
    )


def _result(analysis: _Analysis) -> CountResult:
    z = analysis.count
    return CountResult(
        count=z,
        log_count=math.log(z) if z > 0 else float("-inf"),
        components=[len(c.variables) for c in analysis.components],
    )


# ── Public API ───────────────────────────────────────────────────────

def count(formula: Formula, cap: Optional[int] = None) -> CountResult:
    """Z(Φ), exactly."""
    return _result(_analyse(formula, cap))


def count_conditioned(formula: Formula, literals: Iterable[Literal], cap: Optional[int] = None) -> CountResult:
    """Z(Φ,ℒ): satisfying assignments under which every literal in ℒ is true."""
    literals = check_consistent(literals)
    for lit in literals:
        if lit.var > formula.n:
            raise InputError(f"variable x{lit.var} out of range 1..{formula.n}")
    reduced = assign_all(formula, literals)
    return _result(_analyse(reduced, cap, exclude={lit.var for lit in literals}))


def log_count_soft(formula: Formula, beta: float, cap: Optional[int] = None) -> float:
    """log Z_β(Φ) = log Σ_σ exp(−β · #violated clauses)."""
    if not beta > 0:
        raise InputError(f"beta must be positive, got {beta}")
    return _analyse(formula, cap).log_soft(beta)


def count_soft(formula: Formula, beta: float, cap: Optional[int] = None) -> float:
    return math.exp(log_count_soft(formula, beta, cap))


def marginals(formula: Formula, cap: Optional[int] = None) -> MarginalVector:
    analysis = _analyse(formula, cap)
    if analysis.count == 0:
        raise UnsatisfiableError("unsatisfiable formula: marginals are undefined")
    result = [Fraction(1, 2)] * formula.n
    for comp in analysis.components:
        z = int(comp.hist[0])
        for var, ones in zip(comp.variables, comp.ones.tolist()):
            result[var - 1] = Fraction(ones, z)
    return MarginalVector(tuple(result))


def marginal_population(formula: Formula, cap: Optional[int] = None) -> Population:
    """Empirical distribution of the n marginals, as a population on [0, 1]."""
    return Population(marginals(formula, cap).floats(), low_open=False, high_open=False)


def log_z_or_one(z: int) -> float:
    return math.log(max(z, 1))


def rs_increment_experiment(
    d: float,
    k: int,
    n: int,
    samples: int,
    seed: int,
    cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> IncrementReport:
    """
    Monte Carlo E[log(Z(Φ‴)∨1)] − E[log(Z(Φ″)∨1)] over the coupling,
    sharing Φ′ between the two formulas of every sample.
    """
    if samples < 1:
        raise InputError("need at least one sample")

    def one(i: int) -> Tuple[float, int, int]:
        triple = sample_coupling(d, k, n, seed, stream=(i,))
        z2 = count(triple.extended, cap).count
        z3 = count(triple.augmented, cap).count
        return math.log(max(z3, 1) / max(z2, 1)), z2, z3

    rows = map_ordered(one, range(samples), threads)
    values = np.array([r[0] for r in rows])
    return IncrementReport(
        mean=float(values.mean()),
        std_error=float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0,
        samples=samples,
        unsat_extended=sum(1 for r in rows if r[1] == 0),
        unsat_augmented=sum(1 for r in rows if r[2] == 0),
        above_log2=int(np.sum(values > LOG2 + 1e-12)),
    )


def log_count_experiment(
    d: float,
    k: int,
    n: int,
    samples: int,
    seed: int,
    cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> LogCountReport:
    """Mean of (1/n)·log(Z(Φ)∨1) over independent Φ_{d,k}(n)."""
    if samples < 1:
        raise InputError("need at least one sample")

    def one(i: int) -> int:
        return count(sample_formula(d, k, n, seed, stream=("verify", n, i)), cap).count

    counts = map_ordered(one, range(samples), threads)
    values = np.array([log_z_or_one(z) / n for z in counts])
    return LogCountReport(
        n=n,
        mean=float(values.mean()),
        std_error=float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0,
        samples=samples,
        satisfiable_rate=sum(1 for z in counts if z > 0) / samples,
    )
