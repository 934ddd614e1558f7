# tests/test_manifest.py

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from rscavity.api.manifest import RunManifest, Table, canonical_json, render, sha256_text, to_plain
from rscavity.models.thresholds import moment_bounds
from rscavity.utils.errors import InputError


def test_to_plain_conversions():
    value = {
        "inf": math.inf,
        "ninf": -math.inf,
        "nan": math.nan,
        "frac": Fraction(3, 7),
        "np": np.float64(0.5),
        "ints": (np.int64(2), 3),
        "model": moment_bounds(1.0, 3),
    }
    plain = to_plain(value)
    assert plain["inf"] == "inf"
    assert plain["ninf"] == "-inf"
    assert plain["nan"] == "nan"
    assert plain["frac"] == "3/7"
    assert plain["np"] == 0.5
    assert plain["ints"] == [2, 3]
    assert plain["model"]["k"] == 3


def test_csv_body_and_manifest_block():
    table = Table(["k", "value"], [[3, 0.5], [4, None]])
    text = render(table, RunManifest(command="demo", parameters={"k": 3}, seed=1))
    body, block = text.split("# manifest:\n")
    assert body == "k,value\n3,0.5\n4,\n"
    manifest = json.loads("".join(line[2:] + "\n" for line in block.splitlines()))
    assert manifest["output_digest"] == sha256_text(body)
    assert "wall_time" not in manifest


def test_wall_time_does_not_change_output():
    table = Table(["x"], [[1.25]])
    fast = render(table, RunManifest(command="demo", seed=0, wall_time=0.1), "json")
    slow = render(table, RunManifest(command="demo", seed=0, wall_time=99.0), "json")
    assert fast == slow


def test_json_render_of_table_uses_records():
    table = Table(["k", "d"], [[3, 1.0]])
    out = json.loads(render(table, RunManifest(command="demo"), "json"))
    assert out["data"] == [{"k": 3, "d": 1.0}]
    assert out["manifest"]["output_digest"] == sha256_text(canonical_json(out["data"]))


def test_reports_cannot_be_csv():
    with pytest.raises(InputError, match="--format json"):
        render({"a": 1}, RunManifest(command="count"), "csv")


def test_unknown_format():
    with pytest.raises(InputError):
        render({"a": 1}, RunManifest(command="count"), "xml")
