# tests/test_cnf.py

import math

import pytest

from rscavity.core.cnf import (
    Clause,
    Formula,
    Literal,
    assign,
    assign_all,
    check_consistent,
    clause_multiset,
    graph_distances,
    is_pure,
    occurrences,
)
from rscavity.utils.errors import InputError


def test_literal_ints_and_negation():
    lit = Literal.from_int(-4)
    assert (lit.var, lit.sign) == (4, -1)
    assert (-lit).to_int() == 4
    assert str(lit) == "¬x4"


@pytest.mark.parametrize("var, sign", [(0, 1), (-2, 1), (3, 0), (3, 2)])
def test_literal_rejects_bad_fields(var, sign):
    with pytest.raises(InputError):
        Literal(var, sign)


def test_clause_rejects_repeated_variable():
    with pytest.raises(InputError, match="repeated variable"):
        Clause.from_ints([1, -1, 2])


def test_formula_rejects_out_of_range_literal():
    with pytest.raises(InputError):
        Formula.from_ints(3, 2, [[1, 2, 3]])


def test_occurrences(single_clause, two_clauses):
    assert occurrences(single_clause, 1) == ((0,), ())
    assert occurrences(two_clauses, 1) == ((0,), (1,))


def test_occurrences_of_absent_variable():
    formula = Formula.from_ints(3, 4, [[1, 2, 3]])
    assert occurrences(formula, 4) == ((), ())
    assert is_pure(formula, 4)


def test_occurrences_out_of_range(single_clause):
    with pytest.raises(InputError):
        occurrences(single_clause, 4)


def test_is_pure(single_clause, two_clauses):
    assert is_pure(single_clause, 2)
    assert not is_pure(two_clauses, 1)


def test_assign_satisfied_clause_drops(single_clause):
    assert assign(single_clause, 1, 1).m == 0


def test_assign_strips_falsified_literal(single_clause):
    reduced = assign(single_clause, 1, -1)
    assert [c.to_ints() for c in reduced.clauses] == [(2, 3)]

    negative = Formula.from_ints(3, 5, [[-1, 4, 5]])
    assert [c.to_ints() for c in assign(negative, 1, 1).clauses] == [(4, 5)]


def test_assign_down_to_empty_clause(single_clause):
    reduced = assign_all(single_clause, [Literal(1, -1), Literal(2, -1), Literal(3, -1)])
    assert reduced.m == 1
    assert len(reduced.clauses[0]) == 0


def test_assign_order_independent(four_clauses):
    one = assign(assign(four_clauses, 1, -1), 5, 1)
    two = assign(assign(four_clauses, 5, 1), 1, -1)
    assert clause_multiset(one) == clause_multiset(two)


def test_occurrences_partition_clauses(four_clauses):
    for var in range(1, four_clauses.n + 1):
        pos, neg = occurrences(four_clauses, var)
        containing = {i for i, c in enumerate(four_clauses.clauses) if var in c.variables}
        assert set(pos) | set(neg) == containing
        assert not set(pos) & set(neg)


def test_check_consistent_rejects_complementary_pair():
    with pytest.raises(InputError, match="complementary"):
        check_consistent([Literal(2, 1), Literal(2, -1)])


def test_graph_distances(four_clauses):
    # x1 is in C1 and C2; C3 and C4 are two hops further via x2/x3 or x4/x5
    assert graph_distances(four_clauses, [1]) == [1, 1, 3, 3]


def test_graph_distances_unreachable():
    formula = Formula.from_ints(3, 6, [[1, 2, 3], [4, 5, 6]])
    dist = graph_distances(formula, [1])
    assert dist[0] == 1
    assert math.isinf(dist[1])


def test_variables_in_clauses():
    formula = Formula.from_ints(3, 7, [[1, 2, 3], [-3, 5, 6]])
    assert formula.variables_in_clauses() == (1, 2, 3, 5, 6)
