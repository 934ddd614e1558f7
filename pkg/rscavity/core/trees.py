# rscavity/core/trees.py

"""
Galton–Watson formula trees stored as a struct of arrays.

Nodes are numbered in breadth-first order: root variable 0, then the
clauses below it, then their variables, and so on. Children of a node
are therefore a contiguous id range ``child_start[i] : child_start[i] +
child_count[i]``. The sign of a variable–clause edge lives on the
child endpoint: for a clause node it is sign(parent variable, clause),
for a non-root variable node it is sign(variable, parent clause).
"""

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import IO, List, Optional, Tuple, Union

import numpy as np

from ..utils.errors import ParseError
from .cnf import Clause, Formula, Literal

VARIABLE = 0
CLAUSE = 1


@dataclass(frozen=True)
class GWNode:
    id: int
    kind: str
    sign: Optional[int]
    parent: Optional[int]
    children: Tuple[int, ...]
    label: float


@dataclass(frozen=True, eq=False)
class GWTree:
    kind: np.ndarray
    parent: np.ndarray
    sign: np.ndarray
    label: np.ndarray
    depth_of: np.ndarray     # edge distance from the root
    depth: int               # ℓ, variable levels below the root
    d: float
    k: int
    child_start: np.ndarray = field(init=False)
    child_count: np.ndarray = field(init=False)

    def __post_init__(self):
        size = self.kind.size
        counts = np.bincount(self.parent[1:], minlength=size).astype(np.int64) if size > 1 else np.zeros(size, np.int64)
        starts = np.searchsorted(self.parent[1:], np.arange(size), side="left") + 1
        object.__setattr__(self, "child_count", counts)
        object.__setattr__(self, "child_start", starts.astype(np.int64))

    # ── Shape ─────────────────────────────────────────────────────────

    @property
    def size(self) -> int:
        return int(self.kind.size)

    @property
    def edges(self) -> int:
        return self.size - 1

    def children(self, node: int) -> np.ndarray:
        start = self.child_start[node]
        return np.arange(start, start + self.child_count[node])

    def node(self, node: int) -> GWNode:
        return GWNode(
            id=node,
            kind="variable" if self.kind[node] == VARIABLE else "clause",
            sign=None if node == 0 else int(self.sign[node]),
            parent=None if node == 0 else int(self.parent[node]),
            children=tuple(int(c) for c in self.children(node)),
            label=float(self.label[node]),
        )

    @cached_property
    def variable_ids(self) -> np.ndarray:
        return np.flatnonzero(self.kind == VARIABLE)

    @cached_property
    def clause_ids(self) -> np.ndarray:
        return np.flatnonzero(self.kind == CLAUSE)

    @cached_property
    def var_index(self) -> np.ndarray:
        """Formula variable index (1-based) of each variable node, 0 for clauses."""
        index = np.zeros(self.size, dtype=np.int64)
        index[self.variable_ids] = np.arange(1, self.variable_ids.size + 1)
        return index

    def variables_at_level(self, t: int) -> np.ndarray:
        return np.flatnonzero((self.kind == VARIABLE) & (self.depth_of == 2 * t))

    def boundary(self) -> np.ndarray:
        """Variables at level ℓ (∂^{2ℓ}r)."""
        return self.variables_at_level(self.depth)

    def level_counts(self) -> List[int]:
        """Number of variables at each level 0..ℓ."""
        levels = self.depth_of[self.variable_ids] // 2
        return np.bincount(levels, minlength=self.depth + 1).tolist()

    def subtree(self, node: int) -> np.ndarray:
        """Node ids of the subtree hanging from ``node`` (𝕋_x), in BFS order."""
        ids = [node]
        frontier = np.array([node])
        while frontier.size:
            frontier = np.concatenate([self.children(int(v)) for v in frontier])
            ids.extend(frontier.tolist())
        return np.array(ids, dtype=np.int64)

    def tie_key(self, node: int) -> Tuple[float, int]:
        """Tie-break key: Gaussian label, then node id if labels collide."""
        return (float(self.label[node]), node)


def tree_to_formula(tree: GWTree) -> Formula:
    """The tree as a formula: variables are variable nodes in BFS order, one clause per clause node."""
    index = tree.var_index
    clauses = []
    for a in tree.clause_ids:
        u = int(tree.parent[a])
        lits = [Literal(int(index[u]), int(tree.sign[a]))]
        lits.extend(Literal(int(index[w]), int(tree.sign[w])) for w in tree.children(int(a)))
        clauses.append(Clause(tuple(lits)))
    return Formula(tree.k, int(tree.variable_ids.size), tuple(clauses))


# ── Edge-list export ─────────────────────────────────────────────────

def format_tree_edges(tree: GWTree, seed: Optional[int] = None) -> str:
    header = {
        "format": "rscavity-gwtree",
        "d":      tree.d,
        "k":      tree.k,
        "depth":  tree.depth,
        "nodes":  tree.size,
        "seed":   seed,
    }
    lines = [json.dumps(header, sort_keys=True)]
    kinds = ("variable", "clause")
    for i in range(tree.size):
        lines.append(f"{int(tree.parent[i])} {i} {kinds[tree.kind[i]]} {int(tree.sign[i])} {float(tree.label[i])!r}")
    return "\n".join(lines) + "\n"


def write_tree_edges(tree: GWTree, target: Union[str, Path, IO[str]], seed: Optional[int] = None) -> None:
    """JSON metadata line, then ``parent child kind sign label`` per node (root has parent -1)."""
    text = format_tree_edges(tree, seed)
    if isinstance(target, (str, Path)):
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        target.write(text)


def read_tree_edges(source: Union[str, Path, IO[str]]) -> GWTree:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as f:
            text = f.read()
    else:
        text = source.read()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty tree file")
    try:
        meta = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad metadata header: {exc.msg}", 1)

    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 5 or parts[2] not in ("variable", "clause"):
            raise ParseError(f"expected 'parent child kind sign label', got {line!r}", line_no)
        try:
            parent, child, sign, label = int(parts[0]), int(parts[1]), int(parts[3]), float(parts[4])
        except ValueError:
            raise ParseError(f"bad number in {line!r}", line_no)
        if child != len(rows):
            raise ParseError(f"nodes must be listed in BFS order, expected id {len(rows)}", line_no)
        rows.append((parent, VARIABLE if parts[2] == "variable" else CLAUSE, sign, label))

    if not rows or rows[0][0] != -1:
        raise ParseError("first node must be the root with parent -1", 2)
    parent = np.array([r[0] for r in rows], dtype=np.int64)
    if np.any(parent[1:] < 0) or np.any(np.diff(parent[1:]) < 0) or np.any(parent[1:] >= np.arange(1, len(rows))):
        raise ParseError("parents must be listed in BFS order")
    kind = np.array([r[1] for r in rows], dtype=np.int8)
    depth_of = np.zeros(len(rows), dtype=np.int64)
    for i in range(1, len(rows)):
        depth_of[i] = depth_of[parent[i]] + 1
    return GWTree(
        kind=kind,
        parent=parent,
        sign=np.array([r[2] for r in rows], dtype=np.int8),
        label=np.array([r[3] for r in rows], dtype=np.float64),
        depth_of=depth_of,
        depth=int(meta["depth"]),
        d=float(meta["d"]),
        k=int(meta["k"]),
    )
