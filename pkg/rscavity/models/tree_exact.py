# rscavity/models/tree_exact.py

"""
Exact counts on Galton–Watson trees.

For a variable node x and value t, Z(x, t) counts the satisfying
assignments of the subtree 𝕋_x with x = t. A clause b below x with
children y_1..y_{k-1} contributes

    C(b, t) = Π_y (Z(y,+1) + Z(y,−1))                 if sign(x,b) = t
    C(b, t) = Π_y (Z(y,+1) + Z(y,−1)) − Π_y Z(y, ȳ)   otherwise

where ȳ = −sign(y,b) is the value falsifying y's literal. Z(x, t) is the
product of C(b, t) over the child clauses. Counts are Python ints, so
deep trees do not overflow.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from ..core.trees import CLAUSE, GWTree
from ..utils.errors import InputError, UnsatisfiableError


@dataclass(frozen=True)
class TreeCountTable:
    """
    Per node (plus, minus). For a variable node these are Z(x, +1) and
    Z(x, −1); for a clause node, C(b, +1) and C(b, −1) as seen from its
    parent variable.
    """

    plus: Tuple[int, ...]
    minus: Tuple[int, ...]

    def root(self) -> Tuple[int, int]:
        return self.plus[0], self.minus[0]

    @property
    def total(self) -> int:
        return self.plus[0] + self.minus[0]

    def marginal(self) -> Fraction:
        """P[σ(root) = +1] under a uniformly random satisfying assignment."""
        if self.total == 0:
            raise UnsatisfiableError("tree has no satisfying assignment under this boundary")
        return Fraction(self.plus[0], self.total)


def _check_boundary(tree: GWTree, boundary: Mapping[int, int]) -> Dict[int, int]:
    expected = set(int(v) for v in tree.boundary())
    given = {int(node): int(value) for node, value in boundary.items()}
    if set(given) != expected:
        missing = sorted(expected - set(given))[:5]
        extra = sorted(set(given) - expected)[:5]
        raise InputError(f"boundary must assign exactly the level-{tree.depth} variables "
                         f"(missing {missing}, unexpected {extra})")
    bad = [node for node, value in given.items() if value not in (1, -1)]
    if bad:
        raise InputError(f"boundary values must be +1 or -1 (node {bad[0]})")
    return given


def tree_count(tree: GWTree, boundary: Optional[Mapping[int, int]] = None) -> TreeCountTable:
    """
    Bottom-up exact counts. ``boundary`` maps every level-ℓ variable node
    id to ±1; those variables are then fixed instead of free.
    """
    fixed = _check_boundary(tree, boundary) if boundary is not None else {}
    size = tree.size
    plus: List[int] = [1] * size
    minus: List[int] = [1] * size

    for node, value in fixed.items():
        plus[node], minus[node] = (1, 0) if value > 0 else (0, 1)

    # children always carry larger ids than their parent
    for node in range(size - 1, -1, -1):
        start = int(tree.child_start[node])
        stop = start + int(tree.child_count[node])
        if start == stop:
            continue
        if tree.kind[node] == CLAUSE:
            every = 1
            falsified = 1
            for y in range(start, stop):
                every *= plus[y] + minus[y]
                falsified *= minus[y] if tree.sign[y] > 0 else plus[y]
            if tree.sign[node] > 0:
                plus[node], minus[node] = every, every - falsified
            else:
                plus[node], minus[node] = every - falsified, every
        else:
            z_plus = 1
            z_minus = 1
            for b in range(start, stop):
                z_plus *= plus[b]
                z_minus *= minus[b]
            plus[node], minus[node] = z_plus, z_minus

    return TreeCountTable(tuple(plus), tuple(minus))
