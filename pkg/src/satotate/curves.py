"""Elliptic curves over Q: minimal models, reduction, Frobenius traces and angles.

Traces are computed by one of two routes.  Below ``EXHAUSTIVE_LIMIT`` the
quadratic character sum over all of F_p is evaluated with numpy; above it a
baby-step/giant-step search in the Hasse interval finds the group order,
falling back on the quadratic twist when a single point does not pin it down.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import sympy

EXHAUSTIVE_LIMIT = 2**16

# j-invariants of the CM elliptic curves over Q (class number one orders)
CM_J_INVARIANTS = frozenset({
    0, 1728, -3375, 8000, -32768, 54000, 287496, -884736, -12288000,
    16581375, -884736000, -147197952000, -262537412640768000,
})


class SingularCurveError(ValueError):
    """Raised for a Weierstrass model with zero discriminant."""


class BadReductionError(ValueError):
    """Raised when a good-reduction-only routine is handed a bad prime."""


class HasseViolation(ValueError):
    """Raised when a trace falls outside |a_p| <= 2 sqrt(p)."""


def b_invariants(a1, a2, a3, a4, a6):
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(a1, a2, a3, a4, a6):
    """Return ``(c4, c6, disc)`` of a long Weierstrass model."""
    b2, b4, b6, b8 = b_invariants(a1, a2, a3, a4, a6)
    c4 = b2 * b2 - 24 * b4
    c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return c4, c6, disc


def _valuation(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _kraus_ok(c4: int, c6: int, p: int) -> bool:
    """Local condition at p for (c4, c6) to come from an integral model."""
    if p == 3:
        return _valuation(c6, 3) != 2
    if p == 2:
        if c6 % 4 == 3:
            return True
        return _valuation(c4, 2) >= 4 and c6 % 32 in (0, 8)
    return True


def _model_from_c4c6(c4: int, c6: int) -> tuple[int, int, int, int, int]:
    # reduced model: a1, a3 in {0, 1}, a2 in {-1, 0, 1}
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    b4, rem4 = divmod(b2 * b2 - c4, 24)
    b6, rem6 = divmod(-b2**3 + 36 * b2 * b4 - c6, 216)
    if rem4 or rem6:
        raise ArithmeticError(f"no integral model with c4={c4}, c6={c6}")
    a1 = b2 % 2
    a3 = b6 % 2
    return a1, (b2 - a1) // 4, a3, (b4 - a1 * a3) // 2, (b6 - a3) // 4


@dataclass(frozen=True)
class CurveQ:
    """An elliptic curve over Q given by an integral Weierstrass model.

    ``conductor`` is either supplied by the caller or approximated by the
    radical of the minimal discriminant; ``conductor_mode`` records which.
    """

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    disc_min: int
    conductor: int
    label: str = ""
    conductor_mode: str = "approximated"
    degree: int = 1

    def __post_init__(self):
        if self.disc_min == 0:
            raise SingularCurveError("minimal discriminant is zero")
        if self.conductor < 1:
            raise ValueError("conductor must be positive")
        for p in sympy.primefactors(self.conductor):
            if self.disc_min % p:
                raise ValueError(
                    f"conductor prime {p} does not divide the discriminant {self.disc_min}")

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def name(self) -> str:
        return self.label or "[" + ",".join(map(str, self.ainvs)) + "]"

    def c_invariants(self):
        return c_invariants(*self.ainvs)

    def j_invariant(self) -> Fraction:
        c4, _, disc = self.c_invariants()
        return Fraction(c4**3, disc)

    def with_conductor(self, conductor: int) -> "CurveQ":
        return CurveQ(*self.ainvs, disc_min=self.disc_min, conductor=int(conductor),
                      label=self.label, conductor_mode="supplied", degree=self.degree)


def radical(n: int) -> int:
    return math.prod(sympy.primefactors(abs(n))) if abs(n) > 1 else 1


def minimal_model(ainvs, label: str = "", conductor: Optional[int] = None) -> CurveQ:
    """Return the reduced globally minimal model of the curve with a-invariants ``ainvs``.

    Parameters
    ----------
    ainvs : sequence of 5 ints
        Long Weierstrass coefficients ``a1, a2, a3, a4, a6``.
    label : str, optional
        Carried through to the result.
    conductor : int, optional
        If given, stored with ``conductor_mode="supplied"``; otherwise the
        radical of the minimal discriminant is used.

    Raises
    ------
    SingularCurveError
        If the discriminant vanishes.
    """
    a1, a2, a3, a4, a6 = (int(a) for a in ainvs)
    c4, c6, disc = c_invariants(a1, a2, a3, a4, a6)
    if disc == 0:
        raise SingularCurveError(f"singular model {list(ainvs)}: discriminant is 0")
    g = math.gcd(c4, c6) if c4 else abs(c6)
    u = 1
    for p in sympy.primefactors(math.gcd(g, disc)):
        e = min(_valuation(c4, p) // 4, _valuation(c6, p) // 6, _valuation(disc, p) // 12)
        while e > 0 and not _kraus_ok(c4 // p**(4 * e), c6 // p**(6 * e), p):
            e -= 1
        u *= p**e
    c4m, c6m, dm = c4 // u**4, c6 // u**6, disc // u**12
    model = _model_from_c4c6(c4m, c6m)
    assert c_invariants(*model) == (c4m, c6m, dm)
    if conductor is None:
        return CurveQ(*model, disc_min=dm, conductor=radical(dm), label=label)
    return CurveQ(*model, disc_min=dm, conductor=int(conductor), label=label,
                  conductor_mode="supplied")


def short_model(a4: int, a6: int, label: str = "", conductor: Optional[int] = None) -> CurveQ:
    return minimal_model((0, 0, 0, a4, a6), label=label, conductor=conductor)


def quadratic_twist(curve: CurveQ, d: int, label: str = "") -> CurveQ:
    """Minimal model of the twist of ``curve`` by Q(sqrt(d))."""
    c4, c6, _ = curve.c_invariants()
    return minimal_model((0, 0, 0, -27 * c4 * d * d, -54 * c6 * d**3), label=label)


def reduction_type(curve: CurveQ, p: int) -> str:
    return "bad" if curve.disc_min % p == 0 else "good"


# ---------------------------------------------------------------------------
# point counting

def _count_long_model(ainvs, p: int) -> int:
    """#E(F_p) by enumerating every (x, y); p must be small."""
    a1, a2, a3, a4, a6 = (a % p for a in ainvs)
    n = 1
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                n += 1
    return n


_SQUARE_TABLES: dict[int, np.ndarray] = {}


def _legendre_table(p: int) -> np.ndarray:
    tab = _SQUARE_TABLES.get(p)
    if tab is None:
        tab = np.full(p, -1, dtype=np.int8)
        tab[(np.arange(1, (p + 1) // 2, dtype=np.int64) ** 2) % p] = 1
        tab[0] = 0
        if len(_SQUARE_TABLES) > 64:
            _SQUARE_TABLES.clear()
        _SQUARE_TABLES[p] = tab
    return tab


def trace_exhaustive(curve: CurveQ, p: int) -> int:
    """a_p as minus the quadratic character sum of the completed-square cubic."""
    if p in (2, 3):
        return p + 1 - _count_long_model(curve.ainvs, p)
    b2, b4, b6, _ = b_invariants(*curve.ainvs)
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    x = np.arange(p, dtype=np.int64)
    f = (4 * x + b2 % p) % p
    f = (f * x + (2 * b4) % p) % p
    f = (f * x + b6 % p) % p
    return -int(_legendre_table(p)[f].sum(dtype=np.int64))


# affine arithmetic on y^2 = x^3 + A x + B over F_p, None is the identity

def _ec_add(P, Q, A, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _ec_neg(P, p):
    return None if P is None else (P[0], (-P[1]) % p)


def _ec_mul(n, P, A, p):
    if n < 0:
        return _ec_mul(-n, _ec_neg(P, p), A, p)
    R = None
    while n:
        if n & 1:
            R = _ec_add(R, P, A, p)
        P = _ec_add(P, P, A, p)
        n >>= 1
    return R


def _sqrt_mod(a: int, p: int) -> int:
    """Tonelli-Shanks square root of a quadratic residue a modulo an odd prime p."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def _random_point(A, B, p, rng):
    while True:
        x = rng.randrange(p)
        rhs = (x * x * x + A * x + B) % p
        if rhs == 0:
            return (x, 0)
        if pow(rhs, (p - 1) // 2, p) == 1:
            return (x, _sqrt_mod(rhs, p))


def _point_order(P, A, p, lo, hi):
    """Order of P, given that some multiple n of it lies in [lo, hi]."""
    m = math.isqrt(hi - lo) + 1
    baby = {}
    R = None
    for j in range(m):
        baby.setdefault(_ec_neg(R, p), j)
        R = _ec_add(R, P, A, p)
    step = R  # m * P
    G = _ec_mul(lo, P, A, p)
    n0 = None
    for i in range(m + 1):
        j = baby.get(G)
        if j is not None:
            n0 = lo + i * m + j
            break
        G = _ec_add(G, step, A, p)
    if n0 is None:
        raise ArithmeticError(f"no multiple of the point in [{lo}, {hi}] (p={p})")
    order = n0
    for q in sympy.primefactors(n0):
        while order % q == 0 and _ec_mul(order // q, P, A, p) is None:
            order //= q
    return order


def _seed(label: str, p: int) -> int:
    digest = hashlib.sha256(f"{label}:{p}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def trace_bsgs(curve: CurveQ, p: int, max_rounds: int = 40) -> int:
    """a_p from orders of random points on E and its quadratic twist.

    Candidates N in the Hasse interval must be divisible by the exponent
    lower bound collected on E, and 2p + 2 - N by the one collected on the
    twist.  For p > 229 one of the two pins N down (Mestre); for smaller p an
    unresolved ambiguity falls back on the character sum.
    """
    if p <= 3:
        return trace_exhaustive(curve, p)
    c4, c6, _ = curve.c_invariants()
    A, B = (-27 * c4) % p, (-54 * c6) % p
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    At, Bt = A * d * d % p, B * d * d * d % p
    w = math.isqrt(4 * p)
    lo, hi = p + 1 - w, p + 1 + w
    rng = random.Random(_seed(curve.name, p))
    lcm_e = lcm_t = 1
    for _ in range(max_rounds):
        lcm_e = math.lcm(lcm_e, _point_order(_random_point(A, B, p, rng), A, p, lo, hi))
        lcm_t = math.lcm(lcm_t, _point_order(_random_point(At, Bt, p, rng), At, p, lo, hi))
        first = -(-lo // lcm_e) * lcm_e
        cands = [n for n in range(first, hi + 1, lcm_e) if (2 * p + 2 - n) % lcm_t == 0]
        if len(cands) == 1:
            return p + 1 - cands[0]
    return trace_exhaustive(curve, p)


def trace_of_frobenius(curve: CurveQ, p: int, method: str = "auto") -> int:
    """Trace of Frobenius a_p = p + 1 - #E(F_p) at a good prime p.

    ``method`` is ``"auto"``, ``"exhaustive"`` or ``"bsgs"``.
    """
    if curve.disc_min % p == 0:
        raise BadReductionError(f"p={p} is a prime of bad reduction for {curve.name}")
    if method == "auto":
        method = "exhaustive" if p <= EXHAUSTIVE_LIMIT else "bsgs"
    if method == "exhaustive":
        return trace_exhaustive(curve, p)
    if method == "bsgs":
        return trace_bsgs(curve, p)
    raise ValueError(f"unknown method {method!r}")


def frobenius_angle(a_p: int, p: int) -> float:
    """The angle theta in [0, pi] with a_p = 2 sqrt(p) cos(theta)."""
    if a_p * a_p > 4 * p:
        raise HasseViolation(f"|a_p|={abs(a_p)} exceeds 2*sqrt({p})")
    return math.acos(max(-1.0, min(1.0, a_p / (2.0 * math.sqrt(p)))))


def cm_check(curve: CurveQ) -> bool:
    j = curve.j_invariant()
    return j.denominator == 1 and j.numerator in CM_J_INVARIANTS


# ---------------------------------------------------------------------------
# trace tables

class TableTooLarge(MemoryError):
    """The requested cutoff exceeds the memory budget; build in ranges instead."""


@dataclass(frozen=True)
class TraceRecord:
    p: int
    reduction: str
    a_p: Optional[int] = None

    @property
    def theta(self) -> Optional[float]:
        return None if self.a_p is None else frobenius_angle(self.a_p, self.p)


@dataclass(frozen=True)
class TraceTable:
    """All primes p <= cutoff with reduction type and trace.

    Column arrays (``primes``, ``good``, ``a_p``, ``theta``) are derived once
    for the vectorised sums; a_p is 0 and theta NaN at bad primes.
    """

    curve: CurveQ
    cutoff: float
    records: tuple[TraceRecord, ...]
    primes: np.ndarray = field(init=False, repr=False, compare=False)
    good: np.ndarray = field(init=False, repr=False, compare=False)
    a_p: np.ndarray = field(init=False, repr=False, compare=False)
    theta: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ps = [r.p for r in self.records]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ValueError("records must be strictly increasing in p")
        primes = np.array(ps, dtype=np.int64)
        good = np.array([r.reduction == "good" for r in self.records], dtype=bool)
        a = np.array([r.a_p or 0 for r in self.records], dtype=np.int64)
        if np.any(a * a > 4 * primes):
            raise HasseViolation("table contains a trace outside the Hasse bound")
        with np.errstate(invalid="ignore"):
            theta = np.where(good, np.arccos(np.clip(a / (2.0 * np.sqrt(primes)), -1.0, 1.0)),
                             np.nan)
        for name, arr in (("primes", primes), ("good", good), ("a_p", a), ("theta", theta)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def label(self) -> str:
        return self.curve.name

    def upto(self, x: float) -> np.ndarray:
        """Boolean mask of records with p <= x."""
        if x > self.cutoff:
            raise ValueError(f"table for {self.label} only reaches {self.cutoff}, need {x}")
        return self.primes <= x

    def good_upto(self, x: float) -> np.ndarray:
        return self.upto(x) & self.good

    def __eq__(self, other):
        if not isinstance(other, TraceTable):
            return NotImplemented
        return (self.curve, self.cutoff, self.records) == (other.curve, other.cutoff, other.records)

    __hash__ = None


def primes_upto(x: float, start: int = 2) -> np.ndarray:
    """Primes in [start, x] by a sieve of Eratosthenes."""
    n = int(math.floor(x))
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q::q] = False
    ps = np.flatnonzero(sieve)
    return ps[ps >= start].astype(np.int64)


def _records_for(curve: CurveQ, primes) -> list[TraceRecord]:
    out = []
    for p in primes:
        p = int(p)
        if curve.disc_min % p == 0:
            out.append(TraceRecord(p, "bad"))
        else:
            out.append(TraceRecord(p, "good", trace_of_frobenius(curve, p)))
    return out


# bytes per record held in memory (record object plus column arrays), rough
RECORD_BYTES = 200
DEFAULT_MEMORY_BUDGET = 2 * 1024**3


def build_trace_table(curve: CurveQ, x: float, threads: int = 1, start: int = 2,
                      memory_budget: int = DEFAULT_MEMORY_BUDGET,
                      base: Optional[TraceTable] = None) -> TraceTable:
    """Trace table of ``curve`` for every prime p <= x.

    Parameters
    ----------
    threads : int
        Worker processes; the result does not depend on it.
    start : int
        Lowest prime to compute; used together with ``base`` to extend an
        existing table (records of ``base`` must cover everything below start).
    memory_budget : int
        Bytes; cutoffs whose estimated footprint exceeds it are refused.
    """
    if x < 2:
        raise ValueError("cutoff must be at least 2")
    estimate = int(1.3 * x / max(math.log(x), 1.0)) * RECORD_BYTES
    if estimate > memory_budget:
        stop = int(memory_budget / RECORD_BYTES * math.log(x) / 1.3)
        raise TableTooLarge(
            f"cutoff {x:g} needs ~{estimate / 2**20:.0f} MiB (budget {memory_budget / 2**20:.0f} MiB);"
            f" build the range [{start}, {stop}] first and extend from there")
    primes = primes_upto(x, start)
    if threads > 1 and len(primes) > 1000:
        from concurrent.futures import ProcessPoolExecutor
        chunks = np.array_split(primes, threads * 8)
        with ProcessPoolExecutor(threads) as ex:
            parts = ex.map(_records_for, [curve] * len(chunks), chunks)
            new = [r for part in parts for r in part]
    else:
        new = _records_for(curve, primes)
    old = tuple(r for r in base.records if r.p < start) if base is not None else ()
    return TraceTable(curve, float(x), old + tuple(new))


def extend_trace_table(table: TraceTable, x: float, threads: int = 1) -> TraceTable:
    if x <= table.cutoff:
        return table
    return build_trace_table(table.curve, x, threads=threads,
                             start=int(math.floor(table.cutoff)) + 1, base=table)
