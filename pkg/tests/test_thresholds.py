# tests/test_thresholds.py

import math

import numpy as np
import pytest

from rscavity.models import thresholds
from rscavity.utils.errors import InputError

TABLE1 = {
    2: (1.0, 1.1625, 2.0, 2.0),
    3: (0.5, 0.8792, 1.3431, 4.9108),
    4: (0.3333, 0.8695, 1.2451, 6.1782),
    5: (0.25, 0.9236, 1.2635, 7.0178),
}


@pytest.mark.parametrize("k", sorted(TABLE1))
def test_table1_values(k):
    giant, ms, con, pure = TABLE1[k]
    assert thresholds.d_giant(k) == pytest.approx(giant, abs=5e-5)
    assert thresholds.d_ms(k).value == pytest.approx(ms, abs=5e-5)
    assert thresholds.d_con(k).value == pytest.approx(con, abs=5e-5)
    assert thresholds.d_pure(k).value == pytest.approx(pure, abs=5e-5)


def test_k2_closed_forms():
    assert thresholds.d_con(2).value == pytest.approx(2.0, abs=1e-10)
    pure = thresholds.d_pure(2)
    assert pure.value == 2.0
    assert pure.solver == "closed_form"


@pytest.mark.parametrize("k", range(2, 13))
def test_threshold_ordering(k):
    giant = thresholds.d_giant(k)
    ms = thresholds.d_ms(k).value
    con = thresholds.d_con(k).value
    pure = thresholds.d_pure(k).value
    assert giant < ms < con <= pure + 1e-12


@pytest.mark.parametrize("k", range(2, 9))
def test_root_residuals(k):
    con = thresholds.d_con(k)
    ms = thresholds.d_ms(k)
    assert abs(thresholds.g_con(con.value, k) - 1) < 1e-10
    assert abs(thresholds.g_ms(ms.value, k) - 1) < 1e-10
    assert con.residual < 1e-10
    assert con.solver == "bisection"


@pytest.mark.parametrize("k", [3, 4, 6])
def test_d_pure_is_a_minimum(k):
    report = thresholds.d_pure(k)
    # recover the minimiser by scanning near the reported value
    zs = np.linspace(0.05, 40, 80000)
    values = np.array([thresholds.f_pure(z, k) for z in zs])
    z_star = zs[values.argmin()]
    assert report.value <= values.min() + 1e-9
    for delta in (1e-4, -1e-4):
        assert thresholds.f_pure(z_star + delta, k) >= report.value - 1e-12


@pytest.mark.parametrize("k", range(3, 13))
def test_d_pure_is_finite_and_stationary(k):
    report = thresholds.d_pure(k)
    assert math.isfinite(report.value)
    assert report.solver == "bisection"
    assert report.residual < 1e-9
    lo, hi = report.bracket
    assert 0 < lo < hi


@pytest.mark.parametrize("z", [0.0, -1.0])
def test_f_pure_rejects_non_positive_z(z):
    with pytest.raises(InputError):
        thresholds.f_pure(z, 3)


def test_height_tail_second_step_closed_form():
    p1 = 1 - math.exp(-0.5)
    assert thresholds.height_tail(1.0, 3, 2)[1] == pytest.approx(1 - math.exp(-0.5 * p1 ** 2), abs=1e-15)

def test_moment_bounds_at_d1_k3():
    bounds = thresholds.moment_bounds(1.0, 3)
    assert bounds.lam == pytest.approx(0.6180340, abs=1e-7)
    assert bounds.lam == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-11)
    assert bounds.first_moment == pytest.approx(0.648637, abs=1e-6)
    assert bounds.second_moment == pytest.approx(0.632059, abs=1e-6)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_second_moment_below_first(k):
    for d in np.linspace(0.0, 5.0, 100):
        bounds = thresholds.moment_bounds(float(d), k)
        assert bounds.second_moment <= bounds.first_moment + 1e-12
        lam = bounds.lam
        assert (1 - lam) * (1 + lam) ** (k - 1) == pytest.approx(1.0, abs=1e-10)


def test_moment_bounds_need_k3():
    with pytest.raises(InputError):
        thresholds.moment_bounds(1.0, 2)


def test_reference_asymptotics_k3():
    ref = thresholds.reference_asymptotics(3)
    assert ref["d_sat"] == pytest.approx(14.096, abs=2e-3)
    assert ref["d_rsb"] == pytest.approx(12.477, abs=1e-3)
    assert ref["d_alg"] == pytest.approx(8.789, abs=1e-3)


def test_table1_rows_carry_reference_d_sat():
    rows = thresholds.table1([3, 6])
    assert rows[0]["d_sat_ref"] == pytest.approx(12.801)
    assert rows[1]["d_sat_ref"] is None


def test_height_tail_iterates():
    p = thresholds.height_tail(1.0, 3, 3)
    assert p[0] == pytest.approx(0.3934693, abs=1e-7)
    assert p[1] == pytest.approx(0.0744888, abs=1e-7)
    assert p[2] < p[1]


def test_height_tail_vanishes_past_depth():
    assert thresholds.height_tail(1.0, 3, 4, depth=2)[2:] == [0.0, 0.0]


def test_bad_k():
    with pytest.raises(InputError):
        thresholds.d_con(1)
