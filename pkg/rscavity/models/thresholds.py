# rscavity/models/thresholds.py

"""
The density thresholds d_giant, d_MS, d_con, d_pure, the first and
second moment bounds on (1/n)·log Z, and the leading-order asymptotics
quoted for comparison.
"""

import math
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel
from scipy.optimize import bisect

from ..utils.errors import InputError

ROOT_TOL = 1e-12
BRACKET_START = (1e-9, 1.0)

# Physics predictions for the satisfiability threshold, stored as reference only.
D_SAT_REFERENCE: Dict[int, float] = {2: 2.0, 3: 12.801, 4: 39.724, 5: 105.585}


class ThresholdReport(BaseModel):
    name: str                   # giant | ms | con | pure
    k: int
    value: float
    solver: str                 # closed_form | bisection
    residual: float = 0.0
    iterations: int = 0
    bracket: Optional[Tuple[float, float]] = None


class MomentBounds(BaseModel):
    d: float
    k: int
    first_moment: float
    second_moment: float
    lam: float


def _check_k(k: int, minimum: int = 2) -> None:
    if not isinstance(k, int) or k < minimum:
        raise InputError(f"k must be an integer >= {minimum}, got {k!r}")


# ── Defining functions ───────────────────────────────────────────────

def g_con(d: float, k: int) -> float:
    """(d(k−1)/2)·(1 − e^{−d/2}/2)^{k−2}; also the LL⋆ contraction constant."""
    return d * (k - 1) / 2 * (1 - math.exp(-d / 2) / 2) ** (k - 2)


def g_ms(d: float, k: int) -> float:
    q = math.exp(-d / 2)
    return d * (k - 1) * (1 - q / 4) * (1 - q / 2) ** (k - 2)


def f_pure(z: float, k: int) -> float:
    if not z > 0:
        raise InputError(f"f_pure is defined for z > 0 only, got {z}")
    return z / (-math.expm1(-z / 2)) ** (k - 1)


def _f_pure_log_slope(z: float, k: int) -> float:
    """d/dz log f_pure(z)."""
    q = math.exp(-z / 2)
    return 1 / z - (k - 1) * (q / 2) / (-math.expm1(-z / 2))


def phi_height(z: float, d: float, k: int) -> float:
    """One step of the height-tail recursion: 1 − exp(−(d/2)·z^{k−1})."""
    return -math.expm1(-(d / 2) * z ** (k - 1))


# ── Solvers ──────────────────────────────────────────────────────────

def _solve_unit_crossing(g: Callable[[float], float], name: str, k: int) -> ThresholdReport:
    """Root of g(d) = 1 for increasing g: bisection on a doubling bracket."""
    lo, hi = BRACKET_START
    while g(hi) < 1:
        lo, hi = hi, 2 * hi
        if hi > 1e9:
            raise InputError(f"no crossing of 1 found for d_{name}(k={k})")
    root, info = bisect(lambda d: g(d) - 1, lo, hi, xtol=ROOT_TOL, full_output=True)
    return ThresholdReport(
        name=name,
        k=k,
        value=root,
        solver="bisection",
        residual=abs(g(root) - 1),
        iterations=info.iterations,
        bracket=(lo, hi),
    )


def d_giant(k: int) -> float:
    _check_k(k)
    return 1 / (k - 1)


def d_con(k: int) -> ThresholdReport:
    """sup{d > 0 : (d(k−1)/2)(1 − e^{−d/2}/2)^{k−2} < 1}."""
    _check_k(k)
    return _solve_unit_crossing(lambda d: g_con(d, k), "con", k)


def d_ms(k: int) -> ThresholdReport:
    """sup{d > 0 : d(k−1)(1 − e^{−d/2}/4)(1 − e^{−d/2}/2)^{k−2} < 1}."""
    _check_k(k)
    return _solve_unit_crossing(lambda d: g_ms(d, k), "ms", k)


def d_pure(k: int) -> ThresholdReport:
    """
    min_{z>0} z / (1 − e^{−z/2})^{k−1}; for k = 2 the infimum 2 is reached only as z → ∞.

    For k ≥ 3 the log-slope of f_pure is negative near 0 and changes sign
    once, so the minimiser is the root of the log-slope, found by
    bisection on a doubling bracket that stays inside z > 0.
    """
    _check_k(k)
    if k == 2:
        return ThresholdReport(name="pure", k=k, value=2.0, solver="closed_form")

    lo, hi = 0.25, 0.5
    while _f_pure_log_slope(lo, k) >= 0:
        lo, hi = lo / 2, lo
    while _f_pure_log_slope(hi, k) < 0:
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise InputError(f"no minimum bracket found for d_pure(k={k})")
    z_star, info = bisect(lambda z: _f_pure_log_slope(z, k), lo, hi, xtol=ROOT_TOL, full_output=True)
    return ThresholdReport(
        name="pure",
        k=k,
        value=f_pure(z_star, k),
        solver="bisection",
        residual=abs(_f_pure_log_slope(z_star, k)),
        iterations=info.iterations,
        bracket=(lo, hi),
    )


def _lambda(k: int) -> float:
    """The positive root of (1−λ)(1+λ)^{k−1} = 1."""
    def h(lam: float) -> float:
        return (1 - lam) * (1 + lam) ** (k - 1) - 1

    lo = 1e-6
    if h(lo) <= 0:
        raise InputError(f"no positive root of (1-λ)(1+λ)^{k - 1} = 1")
    hi = lo
    step = 1e-2
    while h(hi) > 0:
        lo, hi = hi, min(hi + step, 1.0)
    return bisect(h, lo, hi, xtol=ROOT_TOL)


def moment_bounds(d: float, k: int) -> MomentBounds:
    """
    First moment:  log 2 + (d/k)·log(1 − 2^{−k})
    Second moment: (1−d)·log 2 + (d/k)·log[(λ^{1/2} + λ^{−1/2})^k − λ^{−k/2}]
    """
    _check_k(k, minimum=3)
    if d < 0:
        raise InputError(f"d must be non-negative, got {d}")
    lam = _lambda(k)
    first = math.log(2) + (d / k) * math.log1p(-(2.0 ** -k))
    inner = (math.sqrt(lam) + 1 / math.sqrt(lam)) ** k - lam ** (-k / 2)
    second = (1 - d) * math.log(2) + (d / k) * math.log(inner)
    return MomentBounds(d=d, k=k, first_moment=first, second_moment=second, lam=lam)


def reference_asymptotics(k: int) -> Dict[str, float]:
    """Leading-order formulas with their o(1) corrections dropped; informational only."""
    _check_k(k, minimum=3)
    log2 = math.log(2)
    return {
        "d_sat":          k * (2 ** k * log2 - (1 + log2) / 2),
        "d_rsb":          k * (2 ** k * log2 - 2 * log2),
        "d_alg":          2 ** k * math.log(k),
        "d_ms_pure":      2 * math.log(k),
        "ll_plus_bound":  2 / (k - 1),
    }


def table1(ks: List[int]) -> List[Dict]:
    rows = []
    for k in ks:
        rows.append({
            "k":         k,
            "d_giant":   d_giant(k),
            "d_ms":      d_ms(k).value,
            "d_con":     d_con(k).value,
            "d_pure":    d_pure(k).value,
            "d_sat_ref": D_SAT_REFERENCE.get(k),
        })
    return rows


def height_tail(d: float, k: int, h_max: int, depth: Optional[int] = None) -> List[float]:
    """
    Analytic P[𝔥_root ≥ h] for h = 1..h_max: p_0 = 1, p_h = φ(p_{h−1});
    on a tree with ``depth`` levels p_h = 0 for h > depth.
    """
    tail = []
    p = 1.0
    for h in range(1, h_max + 1):
        p = phi_height(p, d, k)
        tail.append(0.0 if depth is not None and h > depth else p)
    return tail
