# rscavity/core/dimacs.py

import re
import sys
from pathlib import Path
from typing import IO, Iterable, List, Optional, Union

from ..utils.errors import InputError, ParseError
from .cnf import Clause, Formula, Literal

Source = Union[str, Path, IO[str]]

_WIDTH_COMMENT = re.compile(r"^c\s+k=(\d+)\s*$")


def parse_dimacs(text: str, strict: bool = True, k: Optional[int] = None) -> Formula:
    """
    Parse DIMACS CNF text.

    ``c`` lines are comments, a ``%`` line ends the body (SATLIB files),
    clauses may span lines and end with ``0``. ``k`` defaults to a
    ``c k=N`` comment when one is present, else to the widest clause
    (at least 2).

    Strict mode rejects repeated variables inside a clause, a missing
    final ``0`` and a clause count that disagrees with the header.
    Lenient mode dedupes repeated literals, drops tautologies with a
    warning and tolerates the other two.
    """
    n = declared_m = None
    declared_k = None
    header_line = None
    clauses: List[Clause] = []
    current: List[int] = []
    clause_line = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            match = _WIDTH_COMMENT.match(line)
            if match and n is None:
                declared_k = int(match.group(1))
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if n is not None:
                raise ParseError("duplicate header", line_no)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}, expected 'p cnf n m'", line_no)
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}, expected 'p cnf n m'", line_no)
            if n < 0 or declared_m < 0:
                raise ParseError("negative count in header", line_no)
            header_line = line_no
            continue
        if n is None:
            raise ParseError("clause before 'p cnf' header", line_no)

        for token in line.split():
            try:
                value = int(token)
            except ValueError:
                raise ParseError(f"not an integer literal: {token!r}", line_no)
            if value == 0:
                clause = _finish_clause(current, clause_line or line_no, strict)
                if clause is not None:
                    clauses.append(clause)
                current = []
                clause_line = None
                continue
            if abs(value) > n:
                raise ParseError(f"literal index {abs(value)} exceeds n={n}", line_no)
            if not current:
                clause_line = line_no
            current.append(value)

    if n is None:
        raise ParseError("missing 'p cnf n m' header")
    if current:
        if strict:
            raise ParseError("missing terminating 0", clause_line)
        clause = _finish_clause(current, clause_line, strict)
        if clause is not None:
            clauses.append(clause)
    if strict and len(clauses) != declared_m:
        raise ParseError(f"header declares {declared_m} clauses, found {len(clauses)}", header_line)

    if k is None:
        k = declared_k
    width = k if k is not None else max([2] + [len(c) for c in clauses])
    if any(len(c) > width for c in clauses):
        raise ParseError(f"clause wider than k={width}", header_line)
    return Formula(width, n, tuple(clauses))


def _finish_clause(values: List[int], line_no: int, strict: bool) -> Optional[Clause]:
    if not values:
        raise ParseError("empty clause", line_no)
    seen = {}
    for v in values:
        var = abs(v)
        if var in seen:
            if strict:
                raise ParseError(f"repeated variable {var}", line_no)
            if seen[var] != v:
                print(f"⚠️  line {line_no}: dropping tautological clause {values}", file=sys.stderr)
                return None
            continue
        seen[var] = v
    return Clause(tuple(Literal.from_int(v) for v in seen.values()))


def read_dimacs(source: Source, strict: bool = True, k: Optional[int] = None) -> Formula:
    """Read a formula from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as f:
            return parse_dimacs(f.read(), strict=strict, k=k)
    return parse_dimacs(source.read(), strict=strict, k=k)


def format_dimacs(formula: Formula, comments: Iterable[str] = ()) -> str:
    """
    Render DIMACS text with a ``c k=<k>`` line so the width survives a
    round trip. DIMACS has no encoding for the empty clause; a formula
    holding one is refused.
    """
    if any(len(c) == 0 for c in formula.clauses):
        raise InputError("the empty clause has no DIMACS encoding")
    lines = [f"c {c}" for c in comments]
    lines.append(f"c k={formula.k}")
    lines.append(f"p cnf {formula.n} {formula.m}")
    lines.extend(" ".join(str(v) for v in clause.to_ints() + (0,)) for clause in formula.clauses)
    return "\n".join(lines) + "\n"


def write_dimacs(formula: Formula, target: Source, comments: Iterable[str] = ()) -> None:
    text = format_dimacs(formula, comments)
    if isinstance(target, (str, Path)):
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        target.write(text)
