# rscavity/models/pulp.py

"""
Pure literal elimination, literal heights, and the PULP closure.

Elimination runs in synchronous rounds: every clause holding a variable
that is pure in the current residual formula goes in the same round.
``height(Φ, x, s)`` is 0 when ¬(s·x) never occurs, otherwise the latest
round at which elimination on Φ[x↦s] removes a clause of ∂^{−s}x (∞ if
one survives). Φ[x↦s] is never materialised: the peeler runs on the
base formula with the satisfied clauses masked and x skipped.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np
from pydantic import BaseModel

from ..core.cnf import Formula, Literal, check_consistent, graph_distances
from ..core.generator import sample_formula, sample_gw_tree
from ..core.trees import GWTree, tree_to_formula
from ..utils.errors import InputError
from ..utils.parallel import map_ordered
from ..utils.rng import substream
from .exact import count, count_conditioned
from .thresholds import height_tail

INF = math.inf

CONTRADICTION = "contradiction"
CLOSURE = "closure"


@dataclass(frozen=True)
class EliminationTrace:
    round_of_clause: Tuple[float, ...]   # positive int, or INF for survivors
    rounds: int

    def survivors(self) -> List[int]:
        return [c for c, r in enumerate(self.round_of_clause) if r == INF]


@dataclass(frozen=True)
class ClosureResult:
    outcome: str                                          # closure | contradiction
    closure: FrozenSet[Literal]
    trace: Tuple[Tuple[int, Optional[Literal]], ...]      # (clause chosen, literal added)

    @property
    def contradiction(self) -> bool:
        return self.outcome == CONTRADICTION

    @property
    def size(self) -> int:
        return len(self.closure)

    def to_json_dict(self) -> Dict:
        return {
            "outcome": self.outcome,
            "closure": sorted(lit.to_int() for lit in self.closure),
            "size":    self.size,
            "trace":   [
                {"clause": c, "literal": lit.to_int() if lit is not None else None}
                for c, lit in self.trace
            ],
        }


class _Peeler:
    """Clause/variable incidence of one formula plus its height memo."""

    def __init__(self, formula: Formula):
        self.n = formula.n
        self.m = formula.m
        self.lits: List[Tuple[Tuple[int, int], ...]] = [
            tuple((lit.var, lit.sign) for lit in clause) for clause in formula.clauses
        ]
        self.occ: List[List[Tuple[int, int]]] = [[] for _ in range(self.n + 1)]
        for c, lits in enumerate(self.lits):
            for v, s in lits:
                self.occ[v].append((c, s))
        self.heights: Dict[Tuple[int, int], float] = {}

    def peel(self, dead: Iterable[int] = (), stripped: int = 0) -> Tuple[List[float], int]:
        round_of: List[float] = [INF] * self.m
        alive = [True] * self.m
        for c in dead:
            alive[c] = False
        pos = [0] * (self.n + 1)
        neg = [0] * (self.n + 1)
        for c, lits in enumerate(self.lits):
            if alive[c]:
                for v, s in lits:
                    if v != stripped:
                        if s > 0:
                            pos[v] += 1
                        else:
                            neg[v] += 1

        candidates: Set[int] = {v for v in range(1, self.n + 1) if pos[v] or neg[v]}
        rounds = 0
        while candidates:
            pure = [v for v in candidates if (pos[v] == 0) != (neg[v] == 0)]
            removed = {c for v in pure for c, _ in self.occ[v] if alive[c]}
            if not removed:
                break
            rounds += 1
            touched: Set[int] = set()
            for c in removed:
                alive[c] = False
                round_of[c] = rounds
                for v, s in self.lits[c]:
                    if v == stripped:
                        continue
                    if s > 0:
                        pos[v] -= 1
                    else:
                        neg[v] -= 1
                    touched.add(v)
            candidates = {v for v in touched if pos[v] or neg[v]}
        return round_of, rounds

    def height(self, var: int, s: int) -> float:
        key = (var, s)
        if key not in self.heights:
            opposing = [c for c, sign in self.occ[var] if sign == -s]
            if not opposing:
                self.heights[key] = 0
            else:
                satisfied = [c for c, sign in self.occ[var] if sign == s]
                round_of, _ = self.peel(dead=satisfied, stripped=var)
                self.heights[key] = max(round_of[c] for c in opposing)
        return self.heights[key]


def _peeler(formula: Formula) -> _Peeler:
    if "peeler" not in formula.memo:
        formula.memo["peeler"] = _Peeler(formula)
    return formula.memo["peeler"]


def _check_var(formula: Formula, var: int) -> None:
    if not 1 <= var <= formula.n:
        raise InputError(f"variable x{var} out of range 1..{formula.n}")


# ── Public API ───────────────────────────────────────────────────────

def eliminate(formula: Formula) -> EliminationTrace:
    round_of, rounds = _peeler(formula).peel()
    return EliminationTrace(tuple(round_of), rounds)


def height(formula: Formula, var: int, s: int) -> float:
    """𝔥_x(s, Φ): a non-negative int, or ``math.inf``."""
    _check_var(formula, var)
    if s not in (1, -1):
        raise InputError(f"s must be +1 or -1, got {s!r}")
    return _peeler(formula).height(var, s)


def height_table(formula: Formula) -> List[Dict]:
    return [
        {"var": v, "height_pos": height(formula, v, 1), "height_neg": height(formula, v, -1)}
        for v in range(1, formula.n + 1)
    ]


def pulp(
    formula: Formula,
    initial: Iterable[Literal],
    clause_key: Optional[Callable[[int], object]] = None,
    var_key: Optional[Callable[[int], object]] = None,
) -> ClosureResult:
    """
    Grow L̄ from ℒ until every clause touching ¬L̄ also meets L̄.

    Each step takes the offending clause nearest (in G(Φ)) to the
    variables of ℒ, ties broken by ``clause_key`` (clause index by
    default), and adds the literal of its unassigned variable of least
    height, ties by ``var_key``. If the clause has no unassigned
    variable the run ends in a contradiction and L̄ is all 2n literals.
    """
    initial = check_consistent(initial)
    for lit in initial:
        _check_var(formula, lit.var)
    clause_key = clause_key or (lambda c: c)
    var_key = var_key or (lambda v: v)
    peeler = _peeler(formula)
    dist = graph_distances(formula, {lit.var for lit in initial})

    value: Dict[int, int] = {}
    n_true = [0] * formula.m
    n_false = [0] * formula.m

    def add(lit: Literal) -> None:
        value[lit.var] = lit.sign
        for c, sign in peeler.occ[lit.var]:
            if sign == lit.sign:
                n_true[c] += 1
            else:
                n_false[c] += 1

    for lit in initial:
        add(lit)
    pending = {c for c in range(formula.m) if n_false[c] and not n_true[c]}
    closure = set(initial)
    trace: List[Tuple[int, Optional[Literal]]] = []

    while pending:
        a = min(pending, key=lambda c: (dist[c], clause_key(c)))
        free = [lit for lit in formula.clauses[a] if lit.var not in value]
        if not free:
            trace.append((a, None))
            every = frozenset(Literal(v, s) for v in range(1, formula.n + 1) for s in (1, -1))
            return ClosureResult(CONTRADICTION, every, tuple(trace))
        best = min(free, key=lambda lit: (peeler.height(lit.var, lit.sign), var_key(lit.var)))
        add(best)
        closure.add(best)
        trace.append((a, best))
        for c, _ in peeler.occ[best.var]:
            if n_false[c] and not n_true[c]:
                pending.add(c)
            else:
                pending.discard(c)

    return ClosureResult(CLOSURE, frozenset(closure), tuple(trace))


def pulp_tree(tree: GWTree, initial: Iterable[Literal]) -> ClosureResult:
    """``pulp`` on a tree formula, ties broken by the Gaussian node labels."""
    return pulp(
        tree_to_formula(tree),
        initial,
        clause_key=lambda c: tree.tie_key(int(tree.clause_ids[c])),
        var_key=lambda v: tree.tie_key(int(tree.variable_ids[v - 1])),
    )


def verify_closure(formula: Formula, initial: Iterable[Literal], closure: Iterable[Literal]) -> bool:
    """PULP1 and PULP2 for ``closure`` ⊇ ``initial``."""
    closure = frozenset(closure)
    if not frozenset(initial) <= closure:
        return False
    if any(-lit in closure for lit in closure):
        return False
    for clause in formula.clauses:
        touches_negation = any(-lit in closure for lit in clause)
        if touches_negation and not any(lit in closure for lit in clause):
            return False
    return True


class ClosureBound(BaseModel):
    count: int
    conditioned: int
    closure_size: int
    holds: bool


def closure_bound(
    formula: Formula,
    initial: Iterable[Literal],
    closure: Iterable[Literal],
    cap: Optional[int] = None,
) -> ClosureBound:
    """Z(Φ) ≤ 2^{|L̄|}·Z(Φ,ℒ), checked with exact counts."""
    initial = frozenset(initial)
    size = len(frozenset(closure))
    z = count(formula, cap).count
    zc = count_conditioned(formula, initial, cap).count
    return ClosureBound(count=z, conditioned=zc, closure_size=size, holds=z <= (zc << size))


# ── Trees ────────────────────────────────────────────────────────────

def tree_heights(tree: GWTree) -> Tuple[int, int]:
    """
    (𝔥_root(+1), 𝔥_root(−1)) on a tree, by the level recursion

        T(x) = max over child clauses b opposing x's parent clause of R(b)   (0 if none)
        R(b) = 1 + min over b's children y of T(y)

    and 𝔥_root(s) = max of R(a) over root clauses with sign(root, a) = −s.
    """
    size = tree.size
    t_val = np.zeros(size, dtype=np.int64)
    r_val = np.zeros(size, dtype=np.int64)
    bounds = np.searchsorted(tree.depth_of, np.arange(int(tree.depth_of.max()) + 3))
    top = int(tree.depth_of.max())

    for depth in range(top, 0, -1):
        ids = np.arange(bounds[depth], bounds[depth + 1])
        if depth % 2 == 1:
            kids = tree.child_start[ids][:, None] + np.arange(tree.k - 1)
            r_val[ids] = 1 + t_val[kids].min(axis=1)
        else:
            clauses = np.arange(bounds[depth + 1], bounds[depth + 2])
            if clauses.size:
                owners = tree.parent[clauses]
                contrib = np.where(tree.sign[clauses] != tree.sign[owners], r_val[clauses], 0)
                np.maximum.at(t_val, owners, contrib)

    roots = tree.children(0)
    result = []
    for s in (1, -1):
        opposing = roots[tree.sign[roots] == -s]
        result.append(int(r_val[opposing].max()) if opposing.size else 0)
    return result[0], result[1]


def tree_height(tree: GWTree, s: int) -> int:
    if s not in (1, -1):
        raise InputError(f"s must be +1 or -1, got {s!r}")
    plus, minus = tree_heights(tree)
    return plus if s > 0 else minus


class TailReport(BaseModel):
    d: float
    k: int
    depth: int
    trials: int
    h: List[int]
    empirical_pos: List[float]
    empirical_neg: List[float]
    analytic: List[float]
    sigma: List[float]


def tree_height_tail_mc(
    d: float,
    k: int,
    h_max: int,
    depth: int,
    trials: int,
    seed: int,
    method: str = "tree",
    threads: Optional[int] = None,
) -> TailReport:
    """
    Monte Carlo P[𝔥_root(±1) ≥ h] over 𝕋^{(depth)}_{d,k}, next to the
    analytic iterate. ``method="formula"`` runs the general ``height``
    on each tree formula instead of the level recursion.
    """
    if method not in ("tree", "formula"):
        raise InputError(f"unknown method {method!r}")
    if trials < 1 or h_max < 1:
        raise InputError("need trials >= 1 and h_max >= 1")

    def one_block(block: Tuple[int, int]) -> np.ndarray:
        out = np.empty((block[1] - block[0], 2), dtype=np.float64)
        for row, i in enumerate(range(*block)):
            tree = sample_gw_tree(d, k, depth, seed, stream=("tail", i))
            if method == "tree":
                out[row] = tree_heights(tree)
            else:
                formula = tree_to_formula(tree)
                out[row] = (height(formula, 1, 1), height(formula, 1, -1))
        return out

    blocks = [(start, min(start + 1000, trials)) for start in range(0, trials, 1000)]
    heights = np.concatenate(map_ordered(one_block, blocks, threads))
    hs = list(range(1, h_max + 1))
    analytic = height_tail(d, k, h_max, depth)
    return TailReport(
        d=d,
        k=k,
        depth=depth,
        trials=trials,
        h=hs,
        empirical_pos=[float(np.mean(heights[:, 0] >= h)) for h in hs],
        empirical_neg=[float(np.mean(heights[:, 1] >= h)) for h in hs],
        analytic=analytic,
        sigma=[math.sqrt(p * (1 - p) / trials) for p in analytic],
    )


class ClosureSizeReport(BaseModel):
    d: float
    k: int
    n: int
    literals: int
    trials: int
    contradictions: int
    mean_size: float
    mean_ratio: float
    q95_size: float
    bound_checked: int = 0
    bound_violations: int = 0
    closure_violations: int = 0


def closure_size_experiment(
    d: float,
    k: int,
    n: int,
    trials: int,
    seed: int,
    literals: int = 2,
    check_bound: bool = False,
    cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> ClosureSizeReport:
    """
    PULP on random Φ_{d,k}(n) from ``literals`` random initial literals:
    observed closure sizes, contradiction rate, and optionally the exact
    Z(Φ) ≤ 2^{|L̄|}·Z(Φ,ℒ) check on every non-contradiction run.
    """
    if not 1 <= literals <= n:
        raise InputError(f"need 1 <= literals <= n, got {literals}")

    def one(i: int) -> Tuple[bool, int, bool, bool]:
        formula = sample_formula(d, k, n, seed, stream=("closure", i))
        rng = substream(seed, "closure-literals", i)
        chosen = rng.choice(n, size=literals, replace=False) + 1
        signs = rng.integers(0, 2, size=literals) * 2 - 1
        initial = [Literal(int(v), int(s)) for v, s in zip(chosen, signs)]
        result = pulp(formula, initial)
        if result.contradiction:
            return True, result.size, True, True
        valid = verify_closure(formula, initial, result.closure)
        holds = closure_bound(formula, initial, result.closure, cap).holds if check_bound else True
        return False, result.size, valid, holds

    rows = map_ordered(one, range(trials), threads)
    sizes = np.array([r[1] for r in rows if not r[0]], dtype=np.float64)
    checked = sum(1 for r in rows if not r[0])
    return ClosureSizeReport(
        d=d,
        k=k,
        n=n,
        literals=literals,
        trials=trials,
        contradictions=sum(1 for r in rows if r[0]),
        mean_size=float(sizes.mean()) if sizes.size else 0.0,
        mean_ratio=float(sizes.mean() / literals) if sizes.size else 0.0,
        q95_size=float(np.quantile(sizes, 0.95)) if sizes.size else 0.0,
        bound_checked=checked if check_bound else 0,
        bound_violations=sum(1 for r in rows if not r[0] and not r[3]),
        closure_violations=sum(1 for r in rows if not r[0] and not r[2]),
    )
