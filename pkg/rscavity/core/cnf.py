# rscavity/core/cnf.py

"""
k-CNF formulas over 1-based variables.

A ``Formula`` is immutable; the variable/clause adjacency index is built
lazily on first query and cached on the instance. Reduced formulas
(produced by ``assign``) may hold clauses shorter than ``k``, including
the empty clause, which can never be satisfied.
"""

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from ..utils.errors import InputError


@dataclass(frozen=True, order=True)
class Literal:
    var: int
    sign: int

    def __post_init__(self):
        if not isinstance(self.var, int) or self.var < 1:
            raise InputError(f"variable index must be a positive integer, got {self.var!r}")
        if self.sign not in (1, -1):
            raise InputError(f"literal sign must be +1 or -1, got {self.sign!r}")

    def __neg__(self) -> "Literal":
        return Literal(self.var, -self.sign)

    def __str__(self) -> str:
        return f"x{self.var}" if self.sign > 0 else f"¬x{self.var}"

    def to_int(self) -> int:
        return self.var * self.sign

    @classmethod
    def from_int(cls, value: int) -> "Literal":
        value = int(value)
        if value == 0:
            raise InputError("0 is not a literal")
        return cls(abs(value), 1 if value > 0 else -1)

    def is_true_under(self, value: int) -> bool:
        """True if the literal holds when its variable takes ``value`` (±1)."""
        return self.sign == value


@dataclass(frozen=True)
class Clause:
    literals: Tuple[Literal, ...]

    def __post_init__(self):
        seen = set()
        for lit in self.literals:
            if lit.var in seen:
                raise InputError(f"repeated variable x{lit.var} in clause")
            seen.add(lit.var)

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    @property
    def variables(self) -> Tuple[int, ...]:
        return tuple(lit.var for lit in self.literals)

    def sign_of(self, var: int) -> int:
        """sign(var, clause), or 0 when ``var`` does not occur."""
        for lit in self.literals:
            if lit.var == var:
                return lit.sign
        return 0

    def to_ints(self) -> Tuple[int, ...]:
        return tuple(lit.to_int() for lit in self.literals)

    @classmethod
    def from_ints(cls, values: Iterable[int]) -> "Clause":
        return cls(tuple(Literal.from_int(v) for v in values))

    def __str__(self) -> str:
        return "(" + " ∨ ".join(str(lit) for lit in self.literals) + ")" if self.literals else "□"


@dataclass(frozen=True)
class Formula:
    """Clause list over variables ``1..n``; duplicate clauses are allowed."""

    k: int
    n: int
    clauses: Tuple[Clause, ...] = ()

    def __post_init__(self):
        if self.k < 2:
            raise InputError(f"clause width k must be at least 2, got {self.k}")
        if self.n < 0:
            raise InputError(f"number of variables must be non-negative, got {self.n}")
        if not isinstance(self.clauses, tuple):
            object.__setattr__(self, "clauses", tuple(self.clauses))
        for index, clause in enumerate(self.clauses):
            if len(clause) > self.k:
                raise InputError(f"clause {index} has width {len(clause)} > k={self.k}")
            for lit in clause:
                if lit.var > self.n:
                    raise InputError(f"clause {index} mentions x{lit.var} but n={self.n}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_ints(cls, k: int, n: int, clauses: Iterable[Sequence[int]]) -> "Formula":
        return cls(k, n, tuple(Clause.from_ints(c) for c in clauses))

    # ── Cached views ──────────────────────────────────────────────────

    @cached_property
    def adjacency(self) -> Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]:
        """``adjacency[x] = (∂⁺x, ∂⁻x)`` as sorted clause-index tuples (index 0 unused)."""
        pos: List[List[int]] = [[] for _ in range(self.n + 1)]
        neg: List[List[int]] = [[] for _ in range(self.n + 1)]
        for index, clause in enumerate(self.clauses):
            for lit in clause:
                (pos if lit.sign > 0 else neg)[lit.var].append(index)
        return tuple((tuple(p), tuple(q)) for p, q in zip(pos, neg))

    @cached_property
    def memo(self) -> Dict:
        """Scratch space for tables derived from this snapshot (heights, peeling state)."""
        return {}

    def clause_multiset(self) -> Counter:
        return clause_multiset(self)

    def variables_in_clauses(self) -> Tuple[int, ...]:
        """Sorted variables that occur in at least one clause."""
        return tuple(v for v in range(1, self.n + 1) if any(self.adjacency[v]))

    def assign_all(self, literals: Iterable[Literal]) -> "Formula":
        return assign_all(self, literals)

    def graph_distances(self, sources: Iterable[int]) -> List[float]:
        return graph_distances(self, sources)

    def __str__(self) -> str:
        body = " ∧ ".join(str(c) for c in self.clauses) or "⊤"
        return f"Formula(k={self.k}, n={self.n}, m={self.m}): {body}"


# ── Operations ────────────────────────────────────────────────────────

def _check_var(formula: Formula, var: int) -> None:
    if not 1 <= var <= formula.n:
        raise InputError(f"variable x{var} out of range 1..{formula.n}")


def occurrences(formula: Formula, var: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """(∂⁺x, ∂⁻x): indices of the clauses containing ``var`` positively / negatively."""
    _check_var(formula, var)
    return formula.adjacency[var]


def is_pure(formula: Formula, var: int) -> bool:
    pos, neg = occurrences(formula, var)
    return not pos or not neg


def assign(formula: Formula, var: int, s: int) -> Formula:
    """Φ[x↦s]: drop the clauses the assignment satisfies, strip ``var`` from the rest."""
    _check_var(formula, var)
    if s not in (1, -1):
        raise InputError(f"assigned value must be +1 or -1, got {s!r}")
    kept = []
    for clause in formula.clauses:
        sign = clause.sign_of(var)
        if sign == 0:
            kept.append(clause)
        elif sign != s:
            kept.append(Clause(tuple(lit for lit in clause.literals if lit.var != var)))
    return Formula(formula.k, formula.n, tuple(kept))


def check_consistent(literals: Iterable[Literal]) -> frozenset:
    """Return the literals as a frozenset, rejecting complementary pairs."""
    result = frozenset(literals)
    for lit in result:
        if -lit in result:
            raise InputError(f"complementary pair {lit} / {-lit} in literal set")
    return result


def assign_all(formula: Formula, literals: Iterable[Literal]) -> Formula:
    for lit in sorted(check_consistent(literals)):
        formula = assign(formula, lit.var, lit.sign)
    return formula


def clause_multiset(formula: Formula) -> Counter:
    """Clauses as order-free signed-int tuples, counted with multiplicity."""
    return Counter(tuple(sorted(c.to_ints())) for c in formula.clauses)


def graph_distances(formula: Formula, sources: Iterable[int]) -> List[float]:
    """
    Per-clause distance in the factor graph G(Φ) from a set of variables.

    A clause next to a source variable is at distance 1; clauses that
    cannot be reached get ``inf``.
    """
    adjacency = formula.adjacency
    var_dist: Dict[int, int] = {}
    clause_dist = [float("inf")] * formula.m
    queue: deque = deque()
    for v in sources:
        _check_var(formula, v)
        if v not in var_dist:
            var_dist[v] = 0
            queue.append(v)
    while queue:
        v = queue.popleft()
        pos, neg = adjacency[v]
        for c in pos + neg:
            if clause_dist[c] != float("inf"):
                continue
            clause_dist[c] = var_dist[v] + 1
            for w in formula.clauses[c].variables:
                if w not in var_dist:
                    var_dist[w] = var_dist[v] + 2
                    queue.append(w)
    return clause_dist
