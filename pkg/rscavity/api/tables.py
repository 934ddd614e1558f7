# rscavity/api/tables.py

import math
from typing import Dict, List, Optional

import numpy as np

from ..models.bethe import bethe
from ..models.population import iterate
from ..models.thresholds import (
    d_con, d_giant, d_ms, d_pure, moment_bounds, reference_asymptotics, table1,
)
from ..utils.errors import InputError
from .manifest import Table

TABLE1_COLUMNS = ["k", "d_giant", "d_ms", "d_con", "d_pure", "d_sat_ref"]


def cmd_table1(ks: Optional[List[int]] = None, decimals: int = 4) -> Table:
    """Threshold table, values rounded to ``decimals`` places; d_sat_ref is empty beyond k = 5."""
    ks = ks or [2, 3, 4, 5]
    rows = []
    for row in table1(ks):
        rows.append([
            row["k"],
            *(f"{row[name]:.{decimals}f}" for name in ("d_giant", "d_ms", "d_con", "d_pure")),
            "" if row["d_sat_ref"] is None else f"{row['d_sat_ref']:.{decimals}f}",
        ])
    return Table(TABLE1_COLUMNS, rows)


def cmd_thresholds(k: int, d: Optional[float] = None) -> Dict:
    report: Dict = {
        "k":       k,
        "d_giant": d_giant(k),
        "d_ms":    d_ms(k),
        "d_con":   d_con(k),
        "d_pure":  d_pure(k),
    }
    if k >= 3:
        report["asymptotics"] = reference_asymptotics(k)
    if d is not None:
        report["moment_bounds"] = moment_bounds(d, k)
    return report


def density_grid(d_min: float, d_max: float, step: float) -> List[float]:
    if step <= 0 or d_max < d_min or d_min < 0:
        raise InputError("need 0 <= d_min <= d_max and step > 0")
    count = int(math.floor((d_max - d_min) / step + 1e-9)) + 1
    return [round(d_min + i * step, 12) for i in range(count)]


def cmd_figure1(
    k: int,
    d_min: float,
    d_max: float,
    step: float,
    size: int,
    iters: int,
    mc: int,
    seed: int,
    threads: Optional[int] = None,
) -> Table:
    """Per density: the Bethe value of the iterated population next to the two moment bounds."""
    if k < 3:
        raise InputError("the second moment bound needs k >= 3")
    rows = []
    for index, d in enumerate(density_grid(d_min, d_max, step)):
        pop = iterate(d, k, size, iters, seed=seed + index, threads=threads).population
        estimate = bethe(pop, d, k, mc, seed=seed + index, threads=threads)
        bounds = moment_bounds(d, k)
        rows.append([d, estimate.value, estimate.std_error, bounds.first_moment, bounds.second_moment])
    return Table(["d", "bethe", "bethe_se", "first_moment", "second_moment"], rows)


def trend_statistic(table: Table) -> float:
    """Least-squares slope of bethe against d; negative when the estimate falls with density."""
    d = np.array([row[0] for row in table.rows], dtype=np.float64)
    b = np.array([row[1] for row in table.rows], dtype=np.float64)
    if d.size < 2:
        return 0.0
    return float(np.polyfit(d, b, 1)[0])
