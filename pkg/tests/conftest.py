# tests/conftest.py

import numpy as np
import pytest

from rscavity.core.cnf import Formula
from rscavity.core.trees import GWTree
from rscavity.utils.config import get_settings


def make_tree(kind, parent, sign, depth_of, depth, k=3, d=1.0, label=None) -> GWTree:
    """Hand-built tree; arrays must already be in BFS order."""
    size = len(kind)
    return GWTree(
        kind=np.asarray(kind, dtype=np.int8),
        parent=np.asarray(parent, dtype=np.int64),
        sign=np.asarray(sign, dtype=np.int8),
        label=np.asarray(label if label is not None else np.arange(size), dtype=np.float64),
        depth_of=np.asarray(depth_of, dtype=np.int64),
        depth=depth,
        d=d,
        k=k,
    )


@pytest.fixture
def single_clause() -> Formula:
    """(x1 ∨ x2 ∨ x3)"""
    return Formula.from_ints(3, 3, [[1, 2, 3]])


@pytest.fixture
def two_clauses() -> Formula:
    """(x1 ∨ x2 ∨ x3) ∧ (¬x1 ∨ x4 ∨ x5)"""
    return Formula.from_ints(3, 5, [[1, 2, 3], [-1, 4, 5]])


@pytest.fixture
def four_clauses() -> Formula:
    """C1=(x1∨x2∨x3), C2=(¬x1∨x4∨x5), C3=(¬x2∨x5∨x6), C4=(¬x3∨x6∨x4)"""
    return Formula.from_ints(3, 6, [[1, 2, 3], [-1, 4, 5], [-2, 5, 6], [-3, 6, 4]])


@pytest.fixture
def star_tree() -> GWTree:
    """Root, one clause with the root positive, two positive children: the formula (x1 ∨ x2 ∨ x3)."""
    return make_tree(
        kind=[0, 1, 0, 0],
        parent=[-1, 0, 1, 1],
        sign=[0, 1, 1, 1],
        depth_of=[0, 1, 2, 2],
        depth=1,
    )


@pytest.fixture
def isolated_settings(tmp_path, monkeypatch):
    """Run logs under tmp_path and a fresh settings cache."""
    monkeypatch.setenv("RSCAVITY_LOG_DIR", str(tmp_path / "run_logs"))
    monkeypatch.setenv("RSCAVITY_THREADS", "2")
    get_settings.cache_clear()
    yield get_settings()
    get_settings.cache_clear()
