# rscavity/core/generator.py

"""
Seeded random k-CNF formulas Φ_{d,k}(n), the three-formula coupling
used for the free-entropy increment, and truncated Galton–Watson trees.

All draws come from ``substream(seed, <name>, *stream)``; pass ``stream``
to get independent replicas under one seed (``stream=(i,)`` for sample i).
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..utils.config import get_settings
from ..utils.errors import InputError, ResourceCapError
from ..utils.rng import Key, sample_poisson, substream
from .cnf import Clause, Formula, Literal
from .trees import CLAUSE, VARIABLE, GWTree


@dataclass(frozen=True)
class CouplingTriple:
    base: Formula          # Φ′
    extended: Formula      # Φ″ = Φ′ + Δ″ clauses on n variables
    augmented: Formula     # Φ‴ = Φ′ + x_{n+1} + Δ‴ clauses through x_{n+1}
    deltas: Tuple[int, int]


def _check_params(d: float, k: int, n: int) -> None:
    if d < 0 or not np.isfinite(d):
        raise InputError(f"density d must be finite and non-negative, got {d}")
    if k < 2:
        raise InputError(f"clause width k must be at least 2, got {k}")
    if n < k:
        raise InputError(f"need n >= k, got n={n}, k={k}")


def distinct_variables(rng: np.random.Generator, width: int, n: int, m: int) -> np.ndarray:
    """
    ``m`` rows of ``width`` distinct values from ``0..n-1``, each row a
    uniformly random ``width``-subset, by a partial Fisher–Yates shuffle
    run across all rows at once. Rows come back sorted.
    """
    picks = np.empty((m, width), dtype=np.int64)
    held_pos = np.empty((m, width), dtype=np.int64)
    held_val = np.empty((m, width), dtype=np.int64)
    for j in range(width):
        r = rng.integers(j, n, size=m)
        value = r.copy()
        current_j = np.full(m, j, dtype=np.int64)
        # positions touched by earlier swaps hold the value recorded last
        for i in range(j):
            hit = held_pos[:, i] == r
            value[hit] = held_val[hit, i]
            hit_j = held_pos[:, i] == j
            current_j[hit_j] = held_val[hit_j, i]
        picks[:, j] = value
        held_pos[:, j] = r
        held_val[:, j] = current_j
    picks.sort(axis=1)
    return picks


def random_signs(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.integers(0, 2, size=shape) * 2 - 1


def _clauses(variables: np.ndarray, signs: np.ndarray) -> Tuple[Clause, ...]:
    return tuple(
        Clause(tuple(Literal(int(v), int(s)) for v, s in zip(row_v, row_s)))
        for row_v, row_s in zip(variables.tolist(), signs.tolist())
    )


def _clause_block(rng: np.random.Generator, k: int, n: int, m: int) -> Tuple[Clause, ...]:
    variables = distinct_variables(rng, k, n, m) + 1
    signs = random_signs(rng, (m, k))
    return _clauses(variables, signs)


# ── Public API ───────────────────────────────────────────────────────

def sample_formula(d: float, k: int, n: int, seed: int, stream: Tuple[Key, ...] = ()) -> Formula:
    """Φ_{d,k}(n): Po(dn/k) clauses, each k distinct uniform variables with uniform signs."""
    _check_params(d, k, n)
    rng = substream(seed, "formula", *stream)
    m = sample_poisson(rng, d * n / k)
    return Formula(k, n, _clause_block(rng, k, n, m))


def sample_coupling(d: float, k: int, n: int, seed: int, stream: Tuple[Key, ...] = ()) -> CouplingTriple:
    """
    The coupling (Φ′, Φ″, Φ‴):

        m′ ~ Po(d(n−k+1)/k) clauses on x_1..x_n             → Φ′
        Δ″ ~ Po(d(k−1)/k) more clauses on x_1..x_n           → Φ″
        Δ‴ ~ Po(d) clauses, each x_{n+1} (uniform sign) plus
             k−1 distinct uniform others                     → Φ‴
    """
    _check_params(d, k, n)
    rng = substream(seed, "coupling", *stream)
    m_base = sample_poisson(rng, d * (n - k + 1) / k)
    base = _clause_block(rng, k, n, m_base)
    delta2 = sample_poisson(rng, d * (k - 1) / k)
    extra = _clause_block(rng, k, n, delta2)
    delta3 = sample_poisson(rng, d)
    others = distinct_variables(rng, k - 1, n, delta3) + 1
    new_var = np.full((delta3, 1), n + 1, dtype=np.int64)
    signs = random_signs(rng, (delta3, k))
    through_new = _clauses(np.hstack([others, new_var]), signs)
    return CouplingTriple(
        base=Formula(k, n, base),
        extended=Formula(k, n, base + extra),
        augmented=Formula(k, n + 1, base + through_new),
        deltas=(int(delta2), int(delta3)),
    )


def sample_gw_tree(
    d: float,
    k: int,
    depth: int,
    seed: int,
    stream: Tuple[Key, ...] = (),
    node_cap: Optional[int] = None,
) -> GWTree:
    """
    𝕋^{(ℓ)}_{d,k}: every variable above level ℓ gets Po(d) clause children,
    every clause gets k−1 variable children, every edge an independent
    uniform sign and every node a standard Gaussian label.
    """
    if d < 0 or not np.isfinite(d):
        raise InputError(f"density d must be finite and non-negative, got {d}")
    if k < 2:
        raise InputError(f"clause width k must be at least 2, got {k}")
    if depth < 0:
        raise InputError(f"depth must be non-negative, got {depth}")
    cap = node_cap if node_cap is not None else get_settings().tree_node_cap
    rng = substream(seed, "gwtree", *stream)

    kinds = [np.array([VARIABLE], dtype=np.int8)]
    parents = [np.array([-1], dtype=np.int64)]
    signs = [np.array([0], dtype=np.int8)]
    depths = [np.array([0], dtype=np.int64)]
    frontier = np.array([0], dtype=np.int64)
    next_id = 1

    for level in range(depth):
        if frontier.size == 0:
            break
        counts = sample_poisson(rng, d, size=frontier.size)
        n_clauses = int(counts.sum())
        n_vars = n_clauses * (k - 1)
        if next_id + n_clauses + n_vars > cap:
            raise ResourceCapError("Galton–Watson tree", next_id + n_clauses + n_vars, cap)

        clause_ids = next_id + np.arange(n_clauses, dtype=np.int64)
        kinds.append(np.full(n_clauses, CLAUSE, dtype=np.int8))
        parents.append(np.repeat(frontier, counts))
        signs.append(random_signs(rng, n_clauses).astype(np.int8))
        depths.append(np.full(n_clauses, 2 * level + 1, dtype=np.int64))
        next_id += n_clauses

        var_ids = next_id + np.arange(n_vars, dtype=np.int64)
        kinds.append(np.full(n_vars, VARIABLE, dtype=np.int8))
        parents.append(np.repeat(clause_ids, k - 1))
        signs.append(random_signs(rng, n_vars).astype(np.int8))
        depths.append(np.full(n_vars, 2 * level + 2, dtype=np.int64))
        next_id += n_vars
        frontier = var_ids

    labels = rng.standard_normal(next_id)
    return GWTree(
        kind=np.concatenate(kinds),
        parent=np.concatenate(parents),
        sign=np.concatenate(signs),
        label=labels,
        depth_of=np.concatenate(depths),
        depth=depth,
        d=float(d),
        k=k,
    )
