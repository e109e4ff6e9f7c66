"""Smallest primes at which the traces of two curves differ in a prescribed way.

Every search scans primes in increasing order over two trace tables with the
same prime set, skipping primes that are bad for either curve.  The
``bound_value`` attached to a result is the theoretical bound shape with
constant 1, so ``p_star / bound_value`` reads off an empirical constant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .curves import TraceTable


@dataclass(frozen=True)
class DistinguishResult:
    criterion: str
    curves: tuple[str, str]
    p_star: Optional[int]
    a_p: Optional[tuple[int, int]]
    searched_to: float
    conductor: int
    bound_value: float
    within_bound: Optional[bool]
    ell: Optional[int] = None

    @property
    def found(self) -> bool:
        return self.p_star is not None

    @property
    def status(self) -> str:
        return f"p={self.p_star}" if self.found else f"not found <= {self.searched_to:g}"

    @property
    def empirical_constant(self) -> Optional[float]:
        if not self.found or self.bound_value <= 0:
            return None
        return self.p_star / self.bound_value

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = "distinguish"
        d["curves"] = list(self.curves)
        d["a_p"] = list(self.a_p) if self.a_p else None
        d["status"] = self.status
        d["empirical_constant"] = self.empirical_constant
        return d


def _loglog2(N: int) -> float:
    return math.log(math.log(2 * N))


def opposite_sign_bound(N: int, degree: int = 1) -> float:
    return degree**2 * math.log(N) ** 2 * _loglog2(N) ** 2


def unequal_bound(N: int) -> float:
    return math.log(N) ** 2


def mod_ell_bound(N: int) -> float:
    return math.log(N) ** 2 * _loglog2(N) ** 12


def _scan(t1: TraceTable, t2: TraceTable, predicate: Callable, criterion: str,
          bound: float, x: Optional[float] = None, ell: Optional[int] = None):
    x = min(t1.cutoff, t2.cutoff) if x is None else x
    m1, m2 = t1.upto(x), t2.upto(x)
    primes = t1.primes[m1]
    if not np.array_equal(primes, t2.primes[m2]):
        raise ValueError("trace tables do not share the same primes")
    a1, a2 = t1.a_p[m1], t2.a_p[m2]
    ok = t1.good[m1] & t2.good[m2] & predicate(a1, a2)
    hits = np.flatnonzero(ok)
    names = (t1.curve.name, t2.curve.name)
    N = t1.curve.conductor * t2.curve.conductor
    if hits.size == 0:
        return DistinguishResult(criterion, names, None, None, float(x), N, bound, None, ell)
    i = int(hits[0])
    p = int(primes[i])
    return DistinguishResult(criterion, names, p, (int(a1[i]), int(a2[i])), float(x), N,
                             bound, p <= bound, ell)


def find_opposite_sign(t1: TraceTable, t2: TraceTable, x: Optional[float] = None):
    """Smallest jointly good p with a_p(E1) a_p(E2) < 0."""
    N = t1.curve.conductor * t2.curve.conductor
    return _scan(t1, t2, lambda a, b: a * b < 0, "opposite-sign",
                 opposite_sign_bound(N, t1.curve.degree), x)


def find_unequal(t1: TraceTable, t2: TraceTable, x: Optional[float] = None):
    """Smallest jointly good p with a_p(E1) != a_p(E2)."""
    N = t1.curve.conductor * t2.curve.conductor
    return _scan(t1, t2, lambda a, b: a != b, "unequal-trace", unequal_bound(N), x)


def find_mod_l(t1: TraceTable, t2: TraceTable, ell: int, x: Optional[float] = None):
    """Smallest jointly good p with a_p(E1) and a_p(E2) distinct modulo ell."""
    if ell < 2:
        raise ValueError("ell must be a prime >= 2")
    N = t1.curve.conductor * t2.curve.conductor
    return _scan(t1, t2, lambda a, b: (a - b) % ell != 0, f"mod-ell({ell})",
                 mod_ell_bound(N), x, ell=ell)


@dataclass(frozen=True)
class IsogenyScreen:
    verdict: str  # "distinguished" or "plausibly-isogenous"
    p: Optional[int]
    cutoff: float

    def __str__(self):
        if self.p is None:
            return f"plausibly-isogenous (traces agree for all p <= {self.cutoff:g})"
        return f"distinguished-at({self.p})"


def isogeny_screen(t1: TraceTable, t2: TraceTable, cutoff: Optional[float] = None) -> IsogenyScreen:
    """First prime with unequal traces, else a (non-rigorous) isogeny warning."""
    res = find_unequal(t1, t2, cutoff)
    if res.found:
        return IsogenyScreen("distinguished", res.p_star, res.searched_to)
    return IsogenyScreen("plausibly-isogenous", None, res.searched_to)
