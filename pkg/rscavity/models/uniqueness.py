# rscavity/models/uniqueness.py

"""
Boundary influence on Galton–Watson trees.

τ⁺ is the extremal assignment built top-down from τ⁺(root) = +1: a child
w of clause a (parent u) gets the value satisfying its literal when u
does not already satisfy a, and the falsifying value otherwise.

η_x is the log-likelihood ratio of x taking τ⁺(x) versus −τ⁺(x) in its
subtree, given a boundary condition on the level-ℓ variables. With s_b =
τ⁺(x)·sign(x,b) it obeys

    η_x = −Σ_b s_b · log(1 − Γ(s_b·η_{y_1}, …, s_b·η_{y_{k−1}}))

over the child clauses b of x, Γ being the product of logistic factors.
Everything runs in log space on numpy arrays, one tree level at a time.
±∞ are ordinary float infinities; a level sum that mixes +∞ and −∞ is an
indeterminate form and raises ``InvariantError``.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, log_expit

from ..core.generator import sample_gw_tree
from ..core.trees import GWTree
from ..utils.errors import InputError, InvariantError
from ..utils.parallel import map_ordered

GAP_FLOOR = -1e-12


def gamma_fn(z: Sequence[float]) -> float:
    """Γ(z_1..z_q) = Π (1 + tanh(z_i/2))/2; Γ() = 1, +∞ entries give 1, −∞ entries give 0."""
    values = np.asarray(z, dtype=np.float64).reshape(-1)
    if np.isnan(values).any():
        raise InputError("Γ is undefined at NaN")
    return float(np.prod(expit(values)))


def gamma(z):
    """γ(z) = (1 + tanh(z/2))/2, elementwise; maps a log-likelihood ratio to a probability."""
    return expit(z)


# ── Extremal boundary ────────────────────────────────────────────────

def extremal_boundary(tree: GWTree) -> np.ndarray:
    """τ⁺ for every node; clause entries are 0."""
    tau = np.zeros(tree.size, dtype=np.int8)
    tau[0] = 1
    top = int(tree.depth_of.max())
    for depth in range(2, top + 1, 2):
        ws = np.flatnonzero(tree.depth_of == depth)
        clauses = tree.parent[ws]
        owners = tree.parent[clauses]
        nudge = tree.sign[clauses] != tau[owners]
        tau[ws] = np.where(nudge, tree.sign[ws], -tree.sign[ws])
    return tau


def boundary_assignment(tree: GWTree) -> Dict[int, int]:
    """τ⁺ restricted to the level-ℓ variables, keyed by node id."""
    tau = extremal_boundary(tree)
    return {int(v): int(tau[v]) for v in tree.boundary()}


# ── Boundary conditions ──────────────────────────────────────────────

@dataclass(frozen=True)
class EtaBoundary:
    mode: str                     # plus_infinity | zero | truncated
    cap: float = math.inf
    level: Optional[int] = None

    @classmethod
    def plus_infinity(cls) -> "EtaBoundary":
        return cls("plus_infinity")

    @classmethod
    def zero(cls) -> "EtaBoundary":
        return cls("zero", 0.0)

    @classmethod
    def truncated(cls, cap: float, level: Optional[int] = None) -> "EtaBoundary":
        """
        ``level=None``: the boundary carries +cap instead of +∞.
        ``level=t``: the +∞ table is clipped to [−cap, cap] at variable
        level t and re-propagated upward.
        """
        if not cap > 0 or not math.isfinite(cap):
            raise InputError(f"truncation must be finite and positive, got {cap}")
        if level is not None and level < 0:
            raise InputError(f"truncation level must be non-negative, got {level}")
        return cls("truncated", float(cap), level)


def _propagate(tree: GWTree, eta: np.ndarray, tau: np.ndarray, below: int) -> None:
    """Recompute η in place for every variable above edge depth ``below``."""
    variables = (tree.kind == 0) & (tree.depth_of < below)
    eta[variables] = 0.0
    s_clause = tau[tree.parent].astype(np.float64) * tree.sign
    for depth in range(below - 1, 0, -1):
        if depth % 2 == 0:
            continue
        clauses = np.flatnonzero(tree.depth_of == depth)
        if clauses.size == 0:
            continue
        kids = tree.child_start[clauses][:, None] + np.arange(tree.k - 1)
        s = s_clause[clauses]
        log_g = log_expit(s[:, None] * eta[kids]).sum(axis=1)
        with np.errstate(divide="ignore"):
            terms = -s * np.log(-np.expm1(log_g))
        owners = tree.parent[clauses]
        with np.errstate(invalid="ignore"):
            np.add.at(eta, owners, terms)
        if np.isnan(eta[owners]).any():
            raise InvariantError(f"indeterminate ∞ − ∞ in η at tree depth {depth - 1}")


def eta_tree(tree: GWTree, boundary: EtaBoundary) -> np.ndarray:
    """
    η for every variable node (clause entries are NaN). γ(η_root) is the
    root marginal of +1 under the boundary: conditioned on τ⁺ for
    ``plus_infinity``, unconditioned for ``zero``.
    """
    tau = extremal_boundary(tree)
    eta = np.zeros(tree.size, dtype=np.float64)
    edge_depth = 2 * tree.depth
    at_boundary = tree.boundary()

    if boundary.mode == "truncated" and boundary.level is not None:
        eta[at_boundary] = math.inf
        _propagate(tree, eta, tau, edge_depth)
        level = min(boundary.level, tree.depth)
        clipped = tree.variables_at_level(level)
        eta[clipped] = np.clip(eta[clipped], -boundary.cap, boundary.cap)
        _propagate(tree, eta, tau, 2 * level)
    else:
        eta[at_boundary] = math.inf if boundary.mode == "plus_infinity" else boundary.cap
        _propagate(tree, eta, tau, edge_depth)

    eta[tree.clause_ids] = np.nan
    return eta


def root_marginals(tree: GWTree) -> Tuple[float, float]:
    """(P[σ(r)=1 | τ⁺ on the boundary], P[σ(r)=1])."""
    conditioned = float(gamma(eta_tree(tree, EtaBoundary.plus_infinity())[0]))
    free = float(gamma(eta_tree(tree, EtaBoundary.zero())[0]))
    return conditioned, free


def psi_phi(lam: float, w: float) -> Tuple[float, float, float]:
    """(ψ_λ(w), φ_λ(w), max φ_λ) with ψ_λ(w) = λw(1−w)/(1−λw), φ_λ(w) = ψ_λ(w) + ψ_λ(1−w)."""
    if not 0 < lam <= 1:
        raise InputError(f"lambda must lie in (0, 1], got {lam}")
    if not 0 <= w <= 1:
        raise InputError(f"w must lie in [0, 1], got {w}")

    def psi(x: float) -> float:
        if lam * x == 1:
            return x
        return lam * x / (1 - lam * x) * (1 - x)

    return psi(w), psi(w) + psi(1 - w), (lam / 2) / (1 - lam / 2)


# ── Experiment ───────────────────────────────────────────────────────

def boundary_influence_experiment(
    d: float,
    k: int,
    max_depth: int,
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> List[Dict]:
    """
    Per depth ℓ = 1..max_depth, statistics of the gap between the
    τ⁺-conditioned and the free root marginal over ``trials`` trees.
    """
    if max_depth < 1 or trials < 1:
        raise InputError("need max_depth >= 1 and trials >= 1")

    rows = []
    for depth in range(1, max_depth + 1):
        def block(bounds: Tuple[int, int], depth: int = depth) -> np.ndarray:
            gaps = np.empty(bounds[1] - bounds[0])
            for row, i in enumerate(range(*bounds)):
                tree = sample_gw_tree(d, k, depth, seed, stream=("gap", depth, i))
                conditioned, free = root_marginals(tree)
                gaps[row] = conditioned - free
            return gaps

        blocks = [(s, min(s + 500, trials)) for s in range(0, trials, 500)]
        gaps = np.concatenate(map_ordered(block, blocks, threads))
        if gaps.min() < GAP_FLOOR:
            raise InvariantError(
                f"τ⁺-conditioned root marginal below the free one by {-gaps.min():.3e} at depth {depth}"
            )
        rows.append({
            "depth":     depth,
            "mean_gap":  float(gaps.mean()),
            "std_error": float(gaps.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
            "q50":       float(np.quantile(gaps, 0.5)),
            "q95":       float(np.quantile(gaps, 0.95)),
            "min_gap":   float(gaps.min()),
        })
    return rows
