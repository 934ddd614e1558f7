# rscavity/api/selftest.py

"""
Invariant suite run by ``main.py selftest``.

Each check returns (passed, detail). The report is deterministic given
the seed, so its digest is stable across reruns and thread counts.
"""

import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.cnf import Formula, Literal
from ..core.generator import sample_gw_tree
from ..core.trees import tree_to_formula
from ..models import exact, pulp, thresholds
from ..models.population import Population, bp_step, iterate
from ..models.tree_exact import tree_count
from ..models.typed_operator import contraction_estimate
from ..models.uniqueness import EtaBoundary, eta_tree, extremal_boundary, gamma, root_marginals
from .manifest import canonical_json, sha256_text

# k -> (d_giant, d_ms, d_con, d_pure), four decimals
TABLE1_REFERENCE: Dict[int, Tuple[float, float, float, float]] = {
    2: (1.0, 1.1625, 2.0, 2.0),
    3: (0.5, 0.8792, 1.3431, 4.9108),
    4: (0.3333, 0.8695, 1.2451, 6.1782),
    5: (0.25, 0.9236, 1.2635, 7.0178),
}

Check = Callable[[int], Tuple[bool, str]]


def _table1(reference: Dict[int, Tuple[float, ...]]) -> Check:
    def run(seed: int) -> Tuple[bool, str]:
        bad = []
        for row in thresholds.table1(sorted(reference)):
            got = (row["d_giant"], row["d_ms"], row["d_con"], row["d_pure"])
            for name, value, want in zip(("d_giant", "d_ms", "d_con", "d_pure"), got, reference[row["k"]]):
                if abs(value - want) > 5e-5:
                    bad.append(f"{name}(k={row['k']})={value:.6f}, expected {want}")
        return not bad, "; ".join(bad) or "all rows within 5e-5"
    return run


def _identities(seed: int) -> Tuple[bool, str]:
    problems = []
    if abs(thresholds.d_con(2).value - 2) > 1e-9:
        problems.append("d_con(2) != 2")
    if abs(thresholds.d_pure(2).value - 2) > 1e-9:
        problems.append("d_pure(2) != 2")
    for k in range(2, 13):
        if not thresholds.d_ms(k).value < thresholds.d_con(k).value:
            problems.append(f"d_ms({k}) >= d_con({k})")
    return not problems, "; ".join(problems) or "d_con(2) = d_pure(2) = 2, d_ms < d_con for k ≤ 12"


def _exact_oracles(seed: int) -> Tuple[bool, str]:
    single = Formula.from_ints(3, 3, [[1, 2, 3]])
    every_sign = Formula.from_ints(3, 3, [
        [a * 1, b * 2, c * 3] for a in (1, -1) for b in (1, -1) for c in (1, -1)
    ])
    beta = 2.0
    checks = {
        "Z(x1∨x2∨x3) = 7":     exact.count(single).count == 7,
        "Z(Φ, {x1}) = 4":      exact.count_conditioned(single, [Literal(1, 1)]).count == 4,
        "all sign patterns":   exact.count(every_sign).count == 0,
        "Z_β = 7 + e^{-β}":    abs(exact.count_soft(single, beta) - (7 + math.exp(-beta))) < 1e-9,
        "marginal 4/7":        exact.marginals(single)[1] == Fraction(4, 7),
    }
    failed = [name for name, ok in checks.items() if not ok]
    return not failed, "; ".join(failed) or f"{len(checks)} exact identities hold"


def _tree_exactness(seed: int) -> Tuple[bool, str]:
    worst = 0.0
    for i in range(20):
        tree = sample_gw_tree(1.2, 3, 1 + i % 3, seed, stream=("selftest-tree", i))
        table = tree_count(tree)
        theta = float(gamma(eta_tree(tree, EtaBoundary.zero())[0]))
        worst = max(worst, abs(theta - float(table.marginal())))
        formula = tree_to_formula(tree)
        if formula.n <= 22 and table.total != exact.count(formula).count:
            return False, f"tree {i}: tree_count disagrees with enumeration"
        tau = extremal_boundary(tree)
        values = {int(tree.var_index[v]): int(tau[v]) for v in tree.variable_ids}
        if not all(any(lit.sign == values[lit.var] for lit in clause) for clause in formula.clauses):
            return False, f"tree {i}: τ⁺ does not satisfy the tree formula"
        conditioned, free = root_marginals(tree)
        if conditioned < free - 1e-12:
            return False, f"tree {i}: conditioned marginal below the free one"
    return worst < 1e-10, f"max |γ(Θ_root) − exact| = {worst:.2e} over 20 trees"


def _pulp_bound(seed: int) -> Tuple[bool, str]:
    report = pulp.closure_size_experiment(1.0, 3, 12, 20, seed, literals=2, check_bound=True, threads=1)
    ok = report.bound_violations == 0 and report.closure_violations == 0
    return ok, (f"{report.bound_checked} closures checked, {report.bound_violations} bound violations, "
                f"{report.closure_violations} PULP violations")


def _height_tail(seed: int) -> Tuple[bool, str]:
    p = thresholds.height_tail(1.0, 3, 2)
    ok = abs(p[0] - 0.3934693) < 1e-7 and abs(p[1] - 0.0744888) < 1e-7
    return ok, f"p1 = {p[0]:.7f}, p2 = {p[1]:.7f}"


def _popdyn_symmetry(seed: int) -> Tuple[bool, str]:
    pop = iterate(1.0, 3, 20000, 5, seed, threads=1).population
    gap = abs(pop.mean() - 0.5)
    ok = gap < 5 * pop.std_error() + 1e-3
    return ok, f"|mean − 1/2| = {gap:.2e}"


def _contraction(seed: int) -> Tuple[bool, str]:
    report = contraction_estimate(1.0, 3, 5000, 3, seed, threads=1)
    if report.empirical_ratio is None:
        return False, "every trial was skipped"
    ok = report.empirical_ratio <= report.constant + 0.1
    return ok, f"ratio {report.empirical_ratio:.4f} vs constant {report.constant:.6f}"


def _determinism(seed: int) -> Tuple[bool, str]:
    pop = Population.constant(0.5, 1000)
    one = bp_step(pop, 1.0, 3, 70000, seed, stream=("selftest",), threads=1)
    many = bp_step(pop, 1.0, 3, 70000, seed, stream=("selftest",), threads=4)
    ok = np.array_equal(one.samples, many.samples)
    return ok, "bp_step output identical across thread counts" if ok else "thread count changed bp_step output"


def cmd_selftest(seed: int = 0, reference: Optional[Dict[int, Tuple[float, ...]]] = None) -> Dict:
    checks: List[Tuple[str, Check]] = [
        ("table1_constants", _table1(reference or TABLE1_REFERENCE)),
        ("threshold_identities", _identities),
        ("exact_oracles", _exact_oracles),
        ("tree_bp_exactness", _tree_exactness),
        ("pulp_closure_bound", _pulp_bound),
        ("height_tail_constants", _height_tail),
        ("popdyn_symmetry", _popdyn_symmetry),
        ("ll_star_contraction", _contraction),
        ("thread_determinism", _determinism),
    ]
    results = []
    for name, check in checks:
        try:
            passed, detail = check(seed)
        except Exception as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": bool(passed), "detail": detail})
    failed = [r["name"] for r in results if not r["passed"]]
    return {
        "passed": not failed,
        "failed": failed,
        "checks": results,
        "digest": sha256_text(canonical_json(results)),
    }
