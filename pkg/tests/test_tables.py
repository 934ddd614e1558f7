# tests/test_tables.py

import math

import pytest

from rscavity.api.manifest import Table
from rscavity.api.tables import cmd_figure1, cmd_table1, density_grid, trend_statistic
from rscavity.utils.errors import InputError

LOG2 = math.log(2.0)
FIGURE1_HEADER = ["d", "bethe", "bethe_se", "first_moment", "second_moment"]


def test_density_grid_includes_both_ends():
    assert density_grid(0.0, 1.2, 0.2) == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2]
    assert density_grid(0.5, 0.5, 0.1) == [0.5]


@pytest.mark.parametrize("d_min, d_max, step", [(0.0, 1.0, 0.0), (1.0, 0.5, 0.1), (-0.1, 1.0, 0.1)])
def test_density_grid_rejects_bad_ranges(d_min, d_max, step):
    with pytest.raises(InputError):
        density_grid(d_min, d_max, step)


def test_table1_formats_reference_column():
    table = cmd_table1([2, 6])
    assert table.rows[0][-1] == "2.0000"
    assert table.rows[1][-1] == ""
    assert all(len(cell.split(".")[1]) == 4 for cell in table.rows[0][1:])


def test_figure1_small_grid():
    table = cmd_figure1(3, 0.0, 0.4, 0.2, size=2000, iters=3, mc=2000, seed=0, threads=2)
    assert table.header == FIGURE1_HEADER
    assert [row[0] for row in table.rows] == [0.0, 0.2, 0.4]
    d0 = table.rows[0]
    assert d0[1] == pytest.approx(LOG2, abs=1e-12)
    assert d0[3] == pytest.approx(LOG2, abs=1e-12)
    for _, _, se, first, second in table.rows:
        assert se >= 0
        assert second <= first + 1e-12


def test_figure1_is_thread_independent():
    one = cmd_figure1(3, 0.4, 0.8, 0.4, size=1500, iters=2, mc=1500, seed=5, threads=1)
    many = cmd_figure1(3, 0.4, 0.8, 0.4, size=1500, iters=2, mc=1500, seed=5, threads=3)
    assert one.rows == many.rows


def test_figure1_needs_k_at_least_three():
    with pytest.raises(InputError):
        cmd_figure1(2, 0.0, 0.2, 0.2, size=100, iters=1, mc=100, seed=0)


def test_trend_statistic_is_least_squares_slope():
    table = Table(FIGURE1_HEADER, [[0.0, 1.0, 0, 0, 0], [1.0, 0.5, 0, 0, 0], [2.0, 0.0, 0, 0, 0]])
    assert trend_statistic(table) == pytest.approx(-0.5)


def test_trend_statistic_of_single_point_is_zero():
    assert trend_statistic(Table(FIGURE1_HEADER, [[0.4, 0.6, 0, 0, 0]])) == 0.0


@pytest.mark.slow
def test_figure1_at_desk_scale_sits_between_the_bounds():
    table = cmd_figure1(3, 0.0, 1.2, 0.2, size=100_000, iters=25, mc=100_000, seed=0)
    assert table.rows[0][1] == pytest.approx(LOG2, abs=1e-12)
    for d, value, se, first, second in table.rows[1:]:
        assert second - 3 * se <= value <= first + 3 * se, f"d={d}"
    assert trend_statistic(table) < 0
