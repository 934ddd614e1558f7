# tests/test_exact.py

import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from rscavity.core.cnf import Formula, Literal
from rscavity.core.generator import sample_formula
from rscavity.models import exact
from rscavity.utils.errors import InputError, ResourceCapError, UnsatisfiableError


def brute_force(formula: Formula):
    """(Z, per-variable count of satisfying assignments with x = 1, violation histogram)."""
    z = 0
    ones = [0] * formula.n
    hist = [0] * (formula.m + 1)
    for sigma in product((1, -1), repeat=formula.n):
        violated = sum(1 for c in formula.clauses if not any(sigma[l.var - 1] == l.sign for l in c))
        hist[violated] += 1
        if violated == 0:
            z += 1
            for i, s in enumerate(sigma):
                ones[i] += s > 0
    return z, ones, hist


def test_single_clause(single_clause):
    assert exact.count(single_clause).count == 7
    assert exact.count_conditioned(single_clause, [Literal(1, 1)]).count == 4
    assert exact.marginals(single_clause)[1] == Fraction(4, 7)


def test_every_sign_pattern_is_unsatisfiable():
    clauses = [[a, 2 * b, 3 * c] for a, b, c in product((1, -1), repeat=3)]
    formula = Formula.from_ints(3, 3, clauses)
    result = exact.count(formula)
    assert result.count == 0
    assert result.log_count == -math.inf
    with pytest.raises(UnsatisfiableError):
        exact.marginals(formula)


def test_isolated_variables_double_the_count():
    formula = Formula.from_ints(3, 5, [[1, 2, 3]])
    assert exact.count(formula).count == 28
    assert exact.marginals(formula)[5] == Fraction(1, 2)


def test_empty_formula():
    formula = Formula(3, 4, ())
    assert exact.count(formula).count == 16
    assert exact.count_soft(formula, 1.0) == pytest.approx(16.0)


def test_soft_count_single_clause(single_clause):
    beta = 2.0
    assert exact.count_soft(single_clause, beta) == pytest.approx(7 + math.exp(-beta), rel=1e-12)


def test_soft_count_needs_positive_beta(single_clause):
    with pytest.raises(InputError):
        exact.log_count_soft(single_clause, 0.0)


@pytest.mark.parametrize("seed", range(6))
def test_matches_brute_force(seed):
    formula = sample_formula(1.8, 3, 10, seed=seed)
    z, ones, hist = brute_force(formula)
    assert exact.count(formula).count == z
    beta = 0.7
    expected = math.log(sum(h * math.exp(-beta * v) for v, h in enumerate(hist)))
    assert exact.log_count_soft(formula, beta) == pytest.approx(expected, rel=1e-10)
    if z:
        marg = exact.marginals(formula)
        assert [marg[v] for v in range(1, formula.n + 1)] == [Fraction(o, z) for o in ones]


def vector_count(formula: Formula) -> int:
    """Z by evaluating every assignment at once; fine up to ~20 variables."""
    assignments = np.arange(1 << formula.n, dtype=np.int64)
    ok = np.ones(assignments.size, dtype=bool)
    for clause in formula.clauses:
        sat = np.zeros(assignments.size, dtype=bool)
        for lit in clause:
            bit = ((assignments >> (lit.var - 1)) & 1).astype(bool)
            sat |= bit if lit.sign > 0 else ~bit
        ok &= sat
    return int(ok.sum())


def test_wide_component_uses_high_bits():
    # 20 variables in one component: the enumerator splits them into 16 low and 4 high bits
    clauses = [[v, -(v + 1), v + 2] for v in range(1, 19)] + [[-1, 10, -20]]
    formula = Formula.from_ints(3, 20, clauses)
    result = exact.count(formula, cap=20)
    assert result.components == [20]
    assert result.count == vector_count(formula)


def test_conditioning_equals_restriction(four_clauses):
    literals = [Literal(1, -1), Literal(4, 1)]
    z, _, _ = brute_force(four_clauses)
    restricted = sum(
        1
        for sigma in product((1, -1), repeat=4 + 2)
        if sigma[0] == -1 and sigma[3] == 1
        and all(any(sigma[l.var - 1] == l.sign for l in c) for c in four_clauses.clauses)
    )
    assert exact.count_conditioned(four_clauses, literals).count == restricted
    assert exact.count(four_clauses).count == z


def test_conditioning_rejects_complementary_literals(single_clause):
    with pytest.raises(InputError):
        exact.count_conditioned(single_clause, [Literal(1, 1), Literal(1, -1)])


def test_component_cap():
    formula = Formula.from_ints(3, 5, [[1, 2, 3], [3, 4, 5]])
    with pytest.raises(ResourceCapError):
        exact.count(formula, cap=4)
    assert exact.count(formula, cap=5).components == [5]


def test_components_counted_separately():
    formula = Formula.from_ints(3, 6, [[1, 2, 3], [-4, 5, 6]])
    result = exact.count(formula, cap=3)
    assert result.count == 49
    assert result.components == [3, 3]


def test_increment_experiment_runs():
    report = exact.rs_increment_experiment(1.0, 3, 8, samples=6, seed=3, threads=1)
    assert report.samples == 6
    assert math.isfinite(report.mean)


def test_log_count_experiment_thread_independent():
    one = exact.log_count_experiment(1.0, 3, 10, samples=8, seed=5, threads=1)
    many = exact.log_count_experiment(1.0, 3, 10, samples=8, seed=5, threads=4)
    assert one == many
    assert 0 <= one.satisfiable_rate <= 1
