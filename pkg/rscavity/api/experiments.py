# rscavity/api/experiments.py

from pathlib import Path
from typing import Dict, List, Optional

from ..core.cnf import Formula, Literal
from ..core.dimacs import read_dimacs
from ..core.generator import sample_gw_tree
from ..core.trees import GWTree, read_tree_edges, tree_to_formula
from ..models import exact, pulp
from ..models.bethe import bethe, bethe_beta
from ..models.population import Population, iterate
from ..models.tree_exact import tree_count
from ..models.typed_operator import contraction_estimate
from ..models.uniqueness import EtaBoundary, boundary_influence_experiment, eta_tree, gamma
from ..utils.errors import InputError, ResourceCapError
from .manifest import Table


def parse_literals(text: Optional[str]) -> List[Literal]:
    """``"1,-3"`` → [x1, ¬x3]."""
    if not text:
        return []
    try:
        return [Literal.from_int(int(part)) for part in text.replace(" ", "").split(",") if part]
    except ValueError as exc:
        raise InputError(f"bad literal list {text!r}: {exc}") from exc


def load_formula(path: str, strict: bool = True) -> Formula:
    if not Path(path).exists():
        raise InputError(f"no such file: {path}")
    return read_dimacs(path, strict=strict)


# ── Population dynamics ──────────────────────────────────────────────

def cmd_popdyn(
    d: float,
    k: int,
    size: int,
    iters: int,
    seed: int,
    save: Optional[str] = None,
    threads: Optional[int] = None,
) -> Dict:
    result = iterate(d, k, size, iters, seed, threads=threads)
    pop = result.population
    report = {
        "d":         d,
        "k":         k,
        "size":      size,
        "iters":     iters,
        "mean":      pop.mean(),
        "std_error": pop.std_error(),
        "w1_trace":  result.w1_trace,
        "cauchy":    result.cauchy,
    }
    if save:
        pop.save(save, d=d, k=k, iters=iters, seed=seed)
        report["saved"] = str(save)
    return report


def cmd_bethe(
    d: float,
    k: int,
    size: int,
    iters: int,
    mc: int,
    seed: int,
    beta: Optional[float] = None,
    population: Optional[str] = None,
    threads: Optional[int] = None,
) -> Dict:
    pop = Population.load(population) if population else iterate(d, k, size, iters, seed, threads=threads).population
    if beta is None:
        estimate = bethe(pop, d, k, mc, seed, threads=threads)
    else:
        estimate = bethe_beta(pop, d, k, beta, mc, seed, threads=threads)
    return {"d": d, "k": k, "population_size": pop.size, "estimate": estimate}


# ── Exact counting ───────────────────────────────────────────────────

def cmd_count(
    path: str,
    literals: Optional[str] = None,
    beta: Optional[float] = None,
    with_marginals: bool = False,
    strict: bool = True,
    cap: Optional[int] = None,
) -> Dict:
    formula = load_formula(path, strict)
    assumed = parse_literals(literals)
    result = exact.count_conditioned(formula, assumed, cap) if assumed else exact.count(formula, cap)
    report = {"n": formula.n, "m": formula.m, **result.to_json_dict()}
    if beta is not None:
        report["log_count_soft"] = exact.log_count_soft(formula, beta, cap)
    if with_marginals:
        report["marginals"] = list(exact.marginals(formula, cap).exact)
    return report


# ── PULP ─────────────────────────────────────────────────────────────

def cmd_pulp_run(path: str, literals: str, strict: bool = True) -> Dict:
    formula = load_formula(path, strict)
    initial = parse_literals(literals)
    if not initial:
        raise InputError("PULP needs a non-empty initial literal set")
    result = pulp.pulp(formula, initial)
    report = result.to_json_dict()
    report["valid"] = None if result.contradiction else pulp.verify_closure(formula, initial, result.closure)
    return report


def cmd_pulp_heights(path: str, strict: bool = True) -> Table:
    formula = load_formula(path, strict)
    rows = [[r["var"], r["height_pos"], r["height_neg"]] for r in pulp.height_table(formula)]
    return Table(["var", "height_pos", "height_neg"], rows)


def cmd_pulp_tail(
    d: float,
    k: int,
    h_max: int,
    depth: int,
    trials: int,
    seed: int,
    method: str = "tree",
    threads: Optional[int] = None,
) -> Table:
    report = pulp.tree_height_tail_mc(d, k, h_max, depth, trials, seed, method, threads)
    rows = [
        [h, pos, neg, p, s]
        for h, pos, neg, p, s in zip(report.h, report.empirical_pos, report.empirical_neg, report.analytic, report.sigma)
    ]
    return Table(["h", "empirical_pos", "empirical_neg", "analytic", "sigma"], rows)


def cmd_pulp_sizes(
    d: float,
    k: int,
    n: int,
    trials: int,
    literals: int,
    seed: int,
    check_bound: bool = False,
    cap: Optional[int] = None,
    threads: Optional[int] = None,
) -> Dict:
    report = pulp.closure_size_experiment(d, k, n, trials, seed, literals, check_bound, cap, threads)
    return report.model_dump()


# ── Trees ────────────────────────────────────────────────────────────

def _tree(d: float, k: int, depth: int, seed: int, path: Optional[str]) -> GWTree:
    if path:
        if not Path(path).exists():
            raise InputError(f"no such file: {path}")
        return read_tree_edges(path)
    return sample_gw_tree(d, k, depth, seed)


def cmd_tree_marginal(
    d: float,
    k: int,
    depth: int,
    seed: int,
    path: Optional[str] = None,
    cap: Optional[int] = None,
) -> Dict:
    """Root marginal three ways: tree counts, the η recursion, and (when small enough) enumeration."""
    tree = _tree(d, k, depth, seed, path)
    table = tree_count(tree)
    eta_free = eta_tree(tree, EtaBoundary.zero())[0]
    eta_cond = eta_tree(tree, EtaBoundary.plus_infinity())[0]
    report = {
        "nodes":          tree.size,
        "variables":      int(tree.variable_ids.size),
        "level_counts":   tree.level_counts(),
        "root_counts":    [str(z) for z in table.root()],
        "exact":          table.marginal(),
        "recursion":      float(gamma(eta_free)),
        "conditioned":    float(gamma(eta_cond)),
        "eta_root":       float(eta_cond),
    }
    try:
        report["enumerated"] = exact.marginals(tree_to_formula(tree), cap)[1]
    except ResourceCapError:
        report["enumerated"] = None
    return report


def cmd_tree_boundary_gap(
    d: float,
    k: int,
    depth: int,
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> Table:
    rows = boundary_influence_experiment(d, k, depth, trials, seed, threads)
    header = ["depth", "mean_gap", "std_error", "q50", "q95", "min_gap"]
    return Table(header, [[row[c] for c in header] for row in rows])


# ── LL⋆ ──────────────────────────────────────────────────────────────

def cmd_uniq_contraction(
    d: float,
    k: int,
    size: int,
    trials: int,
    seed: int,
    truncation: Optional[float] = None,
    threads: Optional[int] = None,
) -> Dict:
    report = contraction_estimate(d, k, size, trials, seed, truncation, threads)
    within = None if report.empirical_ratio is None else report.empirical_ratio <= report.constant
    return {**report.model_dump(), "within_constant": within}
