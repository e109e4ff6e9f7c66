"""Prime sums over trace tables, Li(x), and discrepancy reports.

Bad primes are left out of every sum; reports say how many were dropped.
The implied constants of the effective bounds are unknown, so a report
exposes ``ratio = difference / normalizer`` instead of a pass/fail verdict.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .curves import TraceTable, cm_check
from .harmonics import (CharacterExpansion, fourier_to_character, st_measure_interval,
                        su2_character)
from .kernel import (KernelParams, even_window, evaluate_D_exact, truncation_tail_bound,
                     validate_params)


class OutOfRegime(ValueError):
    """Balancing parameters give Delta >= 1/2: x is below the effective range."""


class CMWarning(UserWarning):
    pass


def li(x: float) -> float:
    """Logarithmic integral from 2 to x by adaptive quadrature."""
    if x < 2:
        raise ValueError(f"Li(x) needs x >= 2, got {x}")
    if x == 2:
        return 0.0
    val, _ = integrate.quad(lambda t: 1.0 / math.log(t), 2.0, x, epsabs=0.0,
                            epsrel=1e-13, limit=500)
    return val


# ---------------------------------------------------------------------------
# character sums

@dataclass(frozen=True)
class CharacterSum:
    k: int
    x: float
    value: float
    main_term: float
    residual: float
    shape: float  # d_chi x^(1/2) log(N (x + d_chi))


def character_prime_sum(table: TraceTable, k: int, x: float) -> CharacterSum:
    """sum of chi_k(theta_p) over good p <= x, with its residual against mu(chi_k) Li(x)."""
    mask = table.good_upto(x)
    value = float(np.sum(su2_character(k, table.theta[mask]))) if mask.any() else 0.0
    main = li(x) if k == 0 else 0.0
    d_chi = (k + 1) * table.curve.degree
    shape = d_chi * math.sqrt(x) * math.log(table.curve.conductor * (x + d_chi))
    return CharacterSum(k, x, value, main, value - main, shape)


def character_prime_sums(table: TraceTable, kmax: int, x: float, chunk: int = 4096) -> np.ndarray:
    """S_k = sum_{good p <= x} chi_k(theta_p) for every 0 <= k <= kmax."""
    theta = table.theta[table.good_upto(x)]
    S = np.zeros(kmax + 1)
    for lo in range(0, len(theta), chunk):
        two_cos = 2.0 * np.cos(theta[lo:lo + chunk])
        prev, cur = np.zeros_like(two_cos), np.ones_like(two_cos)
        S[0] += cur.sum()
        for k in range(1, kmax + 1):
            prev, cur = cur, two_cos * cur - prev
            S[k] += cur.sum()
    return S


def window_expansion(params: KernelParams, M: int) -> CharacterExpansion:
    """Character expansion of the even window F_{A,B}, truncated through chi_{M-2}."""
    return fourier_to_character(even_window(params, M).c, truncation_tail_bound(params, M))


@dataclass(frozen=True)
class WindowSum:
    direct: float
    via_characters: float
    main_term: float
    tolerance: float
    n_good: int


def window_prime_sum(table: TraceTable, params: KernelParams, x: float,
                     expansion: CharacterExpansion | None = None, M: int = 200) -> WindowSum:
    """sum of F_{A,B}(theta_p) over good p <= x, by two routes.

    ``direct`` evaluates the window in closed form at each angle;
    ``via_characters`` is sum_k d_k S_k.  They must agree within
    tail * (number of good primes).
    """
    if expansion is None:
        expansion = window_expansion(params, M)
    theta = table.theta[table.good_upto(x)]
    t = theta / (2 * np.pi)
    direct = float(np.sum(evaluate_D_exact(params, t) + evaluate_D_exact(params, -t)))
    S = character_prime_sums(table, len(expansion.d) - 1, x)
    via = float(expansion.d @ S)
    tol = expansion.tail * len(theta) + 1e-9 * max(1, len(theta))
    if abs(direct - via) > tol:
        raise ArithmeticError(
            f"window sums disagree: direct {direct} vs characters {via} (allowed {tol})")
    return WindowSum(direct, via, float(expansion.d[0]) * li(x), tol, len(theta))


# ---------------------------------------------------------------------------
# balancing parameters

@dataclass(frozen=True)
class Balance:
    Delta: float
    M: int
    r: int
    in_regime: bool


def _logs(x, N, degree):
    if x <= 1 or N < 1 or degree < 1:
        raise ValueError("need x > 1, N >= 1, degree >= 1")
    return math.log(x), math.log(N * x)


def _finish(Delta, M_exp, r, strict):
    in_regime = Delta < 0.5
    if strict and not in_regime:
        raise OutOfRegime(f"x below effective range: Delta = {Delta:.4g} >= 1/2")
    return Balance(Delta, math.ceil(Delta ** (-M_exp)), r, in_regime)


def single_params(x: float, N: int, degree: int = 1, strict: bool = True) -> Balance:
    """Delta = x^(-1/4) d^(1/2) log x (log Nx)^(1/2), M = ceil(Delta^-2)."""
    lx, lnx = _logs(x, N, degree)
    return _finish(x ** -0.25 * degree**0.5 * lx * lnx**0.5, 2, 1, strict)


def joint_params(x: float, N: int, degree: int = 1, strict: bool = True) -> Balance:
    """Delta = x^(-1/6) d^(1/3) log x (log Nx)^(1/3), M = ceil(Delta^-3)."""
    lx, lnx = _logs(x, N, degree)
    return _finish(x ** (-1 / 6) * degree ** (1 / 3) * lx * lnx ** (1 / 3), 3, 1, strict)


def distinguish_params(x: float, N: int, degree: int = 1, strict: bool = True) -> Balance:
    """Delta = x^(-1/10) (d log x log Nx)^(1/5), M = ceil(Delta^-5/2), r = 2."""
    lx, lnx = _logs(x, N, degree)
    return _finish(x ** -0.1 * degree**0.2 * lx**0.2 * lnx**0.2, 2.5, 2, strict)


# ---------------------------------------------------------------------------
# reports

def _interval_radians(interval):
    lo, hi = interval
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"interval {interval} (units of pi) must satisfy 0 <= lo <= hi <= 1")
    return lo * math.pi, hi * math.pi


def _in_interval(theta, interval):
    a, b = _interval_radians(interval)
    return (theta >= a) & (theta <= b)


def _conductor_mode(*curves):
    return "supplied" if all(c.conductor_mode == "supplied" for c in curves) else "approximated"


@dataclass(frozen=True)
class DiscrepancyReport:
    curve: str
    x: float
    interval: tuple[float, float]
    observed: int
    main_term: float
    li_x: float
    difference: float
    excess: float
    normalizer: float
    ratio: float
    delta_used: float
    M_used: int
    in_regime: bool
    conductor: int
    conductor_mode: str
    good_primes: int
    bad_primes_dropped: int
    cm: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = "discrepancy"
        d["interval"] = list(self.interval)
        return d


@dataclass(frozen=True)
class JointDiscrepancyReport:
    curves: tuple[str, str]
    x: float
    interval1: tuple[float, float]
    interval2: tuple[float, float]
    observed: int
    main_term: float
    li_x: float
    difference: float
    excess: float
    normalizer: float
    ratio: float
    delta_used: float
    M_used: int
    in_regime: bool
    conductor: int
    conductor_mode: str
    good_primes: int
    bad_primes_dropped: int
    cm: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = "joint"
        for key in ("curves", "interval1", "interval2"):
            d[key] = list(d[key])
        return d


def discrepancy_report(table: TraceTable, interval, x: float) -> DiscrepancyReport:
    """Observed count of good p <= x with theta_p in I against mu_ST(I) Li(x).

    ``interval`` is ``(lo, hi)`` in units of pi.
    """
    curve = table.curve
    cm = cm_check(curve)
    if cm:
        warnings.warn(f"{curve.name} has CM; the equidistribution bound does not apply",
                      CMWarning, stacklevel=2)
    upto, good = table.upto(x), table.good_upto(x)
    observed = int(np.count_nonzero(_in_interval(table.theta[good], interval)))
    lix = li(x)
    main = st_measure_interval(*_interval_radians(interval)) * lix
    N, d = curve.conductor, curve.degree
    normalizer = d**0.5 * x**0.75 * math.log(N * x) ** 0.5
    bal = single_params(x, N, d, strict=False)
    return DiscrepancyReport(
        curve.name, float(x), tuple(map(float, interval)), observed, main, lix,
        abs(observed - main), observed - main, normalizer, abs(observed - main) / normalizer,
        bal.Delta, bal.M, bal.in_regime, N, curve.conductor_mode,
        int(np.count_nonzero(good)), int(np.count_nonzero(upto & ~table.good)), cm)


def _check_shared(t1: TraceTable, t2: TraceTable, x: float):
    m1, m2 = t1.upto(x), t2.upto(x)
    if not np.array_equal(t1.primes[m1], t2.primes[m2]):
        raise ValueError("trace tables do not share the same primes up to x")
    return m1, m2


def joint_discrepancy_report(t1: TraceTable, t2: TraceTable, interval1, interval2,
                             x: float) -> JointDiscrepancyReport:
    """Joint count of p <= x, good for both curves, with theta_1 in I1 and theta_2 in I2."""
    c1, c2 = t1.curve, t2.curve
    cm = cm_check(c1) or cm_check(c2)
    if cm:
        warnings.warn("a curve has CM; the joint equidistribution bound does not apply",
                      CMWarning, stacklevel=2)
    m1, m2 = _check_shared(t1, t2, x)
    good = t1.good[m1] & t2.good[m2]
    th1, th2 = t1.theta[m1][good], t2.theta[m2][good]
    observed = int(np.count_nonzero(_in_interval(th1, interval1) & _in_interval(th2, interval2)))
    lix = li(x)
    main = st_measure_interval(*_interval_radians(interval1)) \
        * st_measure_interval(*_interval_radians(interval2)) * lix
    N = c1.conductor * c2.conductor
    d = c1.degree
    normalizer = d ** (1 / 3) * x ** (5 / 6) * math.log(N * x) ** (1 / 3)
    bal = joint_params(x, N, d, strict=False)
    return JointDiscrepancyReport(
        (c1.name, c2.name), float(x), tuple(map(float, interval1)), tuple(map(float, interval2)),
        observed, main, lix, abs(observed - main), observed - main, normalizer,
        abs(observed - main) / normalizer, bal.Delta, bal.M, bal.in_regime, N,
        _conductor_mode(c1, c2), int(np.count_nonzero(good)),
        int(np.count_nonzero(~good)), cm)


def bound_shape_fit(reports: Sequence[DiscrepancyReport]) -> float:
    """Least-squares slope of log|difference| against log x (differences floored at 1)."""
    if len(reports) < 3:
        raise ValueError("need at least 3 reports")
    if len({(r.curve, r.interval) for r in reports}) != 1:
        raise ValueError("reports must share curve and interval")
    xs = [r.x for r in reports]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("reports must be at increasing x")
    logx = np.log(xs)
    logd = np.log([max(r.difference, 1.0) for r in reports])
    return float(np.polyfit(logx, logd, 1)[0])


def sandwich_sums(table: TraceTable, interval, x: float, Delta: float, r: int = 1):
    """(inner window sum, indicator count, outer window sum) for I = [lo pi, hi pi].

    The windows F_{alpha +- Delta/2, beta -+ Delta/2} bracket the indicator
    pointwise on [0, pi], so the three numbers are non-decreasing.
    """
    alpha, beta = interval[0] / 2, interval[1] / 2
    inner = validate_params(alpha + Delta / 2, beta - Delta / 2, Delta, r)
    outer = validate_params(alpha - Delta / 2, beta + Delta / 2, Delta, r)
    theta = table.theta[table.good_upto(x)] / (2 * np.pi)

    def total(p):
        return float(np.sum(evaluate_D_exact(p, theta) + evaluate_D_exact(p, -theta)))

    count = int(np.count_nonzero(_in_interval(table.theta[table.good_upto(x)], interval)))
    return total(inner), count, total(outer)
