# rscavity/api/manifest.py

"""
Run manifests and output rendering.

A command returns either a ``Table`` (rendered as CSV by default) or a
plain dict (rendered as JSON). The data body is hashed into the
manifest's ``output_digest``; the manifest is appended to the output
without ``wall_time`` so reruns with the same parameters and seed are
byte-identical. The wall time only goes to the JSONL run log.
"""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel

from .. import __version__
from ..utils.errors import InputError


class RunManifest(BaseModel):
    command: str
    parameters: Dict[str, Any] = {}
    seed: Optional[int] = None
    tool_version: str = __version__
    wall_time: float = 0.0
    output_digest: str = ""

    def reproducible(self) -> Dict[str, Any]:
        """Everything but the wall time."""
        return self.model_dump(exclude={"wall_time"})


@dataclass
class Table:
    header: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.header, row)) for row in self.rows]


Payload = Union[Table, Dict[str, Any]]


def to_plain(value: Any) -> Any:
    """JSON-safe version of a result: ±∞/NaN as strings, Fractions as "p/q", models as dicts."""
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump())
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if hasattr(value, "item"):           # numpy scalars
        return to_plain(value.item())
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return str(value)


def canonical_json(obj: Any) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _cell(value: Any) -> str:
    value = to_plain(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(table: Table, manifest: RunManifest) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    body = buffer.getvalue()
    manifest.output_digest = sha256_text(body)
    block = json.dumps(to_plain(manifest.reproducible()), sort_keys=True, ensure_ascii=False, indent=2)
    return body + "# manifest:\n" + "".join(f"# {line}\n" for line in block.splitlines())


def render_json(payload: Payload, manifest: RunManifest) -> str:
    data = payload.records() if isinstance(payload, Table) else payload
    manifest.output_digest = sha256_text(canonical_json(data))
    return canonical_json({"data": data, "manifest": manifest.reproducible()})


def render(payload: Payload, manifest: RunManifest, fmt: Optional[str] = None) -> str:
    fmt = fmt or ("csv" if isinstance(payload, Table) else "json")
    if fmt == "json":
        return render_json(payload, manifest)
    if fmt == "csv":
        if not isinstance(payload, Table):
            raise InputError(f"'{manifest.command}' produces a structured report; use --format json")
        return render_csv(payload, manifest)
    raise InputError(f"unknown output format {fmt!r}")
