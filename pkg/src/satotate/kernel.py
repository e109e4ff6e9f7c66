"""Smoothed interval indicators on the circle R/Z and their even windows.

``D`` is the periodised indicator of [A, B] convolved r times with the
normalised box of width Delta/r.  Its complex Fourier coefficients are

    D^(m) = (e(-mA) - e(-mB)) / (2 pi i m) * sinc(m Delta / r)^r,

so every bound needed downstream has a closed form.  The cosine/sine
coefficients are a_m = 2 Re D^(m) and b_m = -2 Im D^(m), giving
D(x) = a_0 + sum_m a_m cos(2 pi m x) + b_m sin(2 pi m x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_EVAL_TOL = 1e-6


class KernelParamError(ValueError):
    pass


@dataclass(frozen=True)
class KernelParams:
    A: float
    B: float
    Delta: float
    r: int = 1

    @property
    def width(self) -> float:
        return self.B - self.A


def validate_params(A, B, Delta, r=1) -> KernelParams:
    """Check 0 < Delta < 1/2, Delta <= B - A <= 1 - Delta and r >= 1."""
    A, B, Delta = float(A), float(B), float(Delta)
    if int(r) != r or r < 1:
        raise KernelParamError(f"r = {r} must be a positive integer")
    if not 0 < Delta < 0.5:
        raise KernelParamError(f"need 0 < Delta < 1/2, got Delta = {Delta}")
    if not Delta <= B - A:
        raise KernelParamError(f"need Delta <= B - A, got Delta = {Delta} > B - A = {B - A}")
    if not B - A <= 1 - Delta:
        raise KernelParamError(f"need B - A <= 1 - Delta, got B - A = {B - A} > {1 - Delta}")
    return KernelParams(A, B, Delta, int(r))


def coefficient_bound(params: KernelParams, m):
    """min{2(B-A), 2/(pi m), 2/(pi m) (r/(pi m Delta))^r} for m >= 1."""
    m = np.asarray(m, dtype=float)
    r = params.r
    base = 2.0 / (np.pi * m)
    return np.minimum(np.minimum(2.0 * params.width, base),
                      base * (r / (np.pi * m * params.Delta)) ** r)


def complex_coefficients(params: KernelParams, m) -> np.ndarray:
    m = np.atleast_1d(np.asarray(m, dtype=float))
    out = np.empty(m.shape, dtype=complex)
    zero = m == 0
    out[zero] = params.width
    mm = m[~zero]
    box = (np.exp(-2j * np.pi * mm * params.A) - np.exp(-2j * np.pi * mm * params.B)) \
        / (2j * np.pi * mm)
    # np.sinc(t) = sin(pi t)/(pi t)
    out[~zero] = box * np.sinc(mm * params.Delta / params.r) ** params.r
    return out


def fourier_coefficients(params: KernelParams, m):
    """Arrays ``(a_m, b_m)`` for the given indices (a_0 = B - A, b_0 = 0)."""
    m = np.atleast_1d(np.asarray(m))
    c = complex_coefficients(params, m)
    a = np.where(m == 0, params.width, 2.0 * c.real)
    b = np.where(m == 0, 0.0, -2.0 * c.imag)
    return a, b


def fourier_coefficient(params: KernelParams, m: int) -> tuple[float, float]:
    if m < 0:
        raise ValueError("m must be non-negative")
    a, b = fourier_coefficients(params, [m])
    return float(a[0]), float(b[0])


def _decay_constant(params: KernelParams) -> float:
    r = params.r
    return (2.0 / math.pi) * (r / (math.pi * params.Delta)) ** r


def evaluation_tail_bound(params: KernelParams, M: int) -> float:
    """Sup-norm bound on sum_{m > M} |a_m cos + b_m sin| for D.

    Each term is at most 2|D^(m)| <= C m^(-r-1) with C = (2/pi)(r/(pi Delta))^r,
    and sum_{m > M} m^(-r-1) <= M^(-r)/r.
    """
    return _decay_constant(params) * M ** (-params.r) / params.r


def default_eval_order(params: KernelParams, tol: float = DEFAULT_EVAL_TOL) -> int:
    C, r = _decay_constant(params), params.r
    M = max(1, math.ceil((C / (r * tol)) ** (1.0 / r)))
    while M > 1 and evaluation_tail_bound(params, M - 1) <= tol:
        M -= 1
    while evaluation_tail_bound(params, M) > tol:
        M += 1
    return M


def _cos_sin_sum(coef_cos, coef_sin, phase, chunk=2048):
    """sum_{m=1}^{M} coef_cos[m-1] cos(m phase) + coef_sin[m-1] sin(m phase)."""
    phase = np.asarray(phase, dtype=float)
    flat = phase.ravel()
    total = np.zeros(flat.shape)
    M = len(coef_cos)
    for lo in range(0, M, chunk):
        ms = np.arange(lo + 1, min(M, lo + chunk) + 1, dtype=float)
        arg = np.outer(flat, ms)
        total += np.cos(arg) @ coef_cos[lo:lo + chunk]
        if coef_sin is not None:
            total += np.sin(arg) @ coef_sin[lo:lo + chunk]
    return total.reshape(phase.shape)


def evaluate_D(params: KernelParams, x, M_eval: int | None = None):
    """Truncated Fourier evaluation of D at ``x`` (scalar or array).

    Returns ``(value, error_bound)``; the true D(x) lies within error_bound
    of value.  ``M_eval`` defaults to the smallest order whose tail bound is
    at most 1e-6.
    """
    if M_eval is None:
        M_eval = default_eval_order(params)
    if M_eval < 1:
        raise ValueError("M_eval must be at least 1")
    a, b = fourier_coefficients(params, np.arange(1, M_eval + 1))
    value = params.width + _cos_sin_sum(a, b, 2.0 * np.pi * np.asarray(x, dtype=float))
    if np.ndim(value) == 0:
        value = float(value)
    return value, evaluation_tail_bound(params, M_eval)


def _smoothed_step(t, Delta: float, r: int):
    """Heaviside step convolved with r boxes of width Delta/r (Irwin-Hall CDF)."""
    h = Delta / r
    s = np.clip(np.asarray(t, dtype=float) / h + r / 2.0, 0.0, r)
    out = np.zeros_like(s)
    for k in range(r + 1):
        out += (-1) ** k * math.comb(r, k) * np.where(s > k, s - k, 0.0) ** r
    return out / math.factorial(r)


def evaluate_D_exact(params: KernelParams, x):
    """D(x) from its piecewise-polynomial form; no truncation error."""
    x = np.asarray(x, dtype=float)
    # reduce so that x - A lies in [-Delta/2, 1 - Delta/2); the pieces
    # around A and B then never wrap
    y = params.A + np.mod(x - params.A + params.Delta / 2, 1.0) - params.Delta / 2
    steps = _smoothed_step(y - params.A, params.Delta, params.r) \
        - _smoothed_step(y - params.B, params.Delta, params.r)
    return float(steps) if steps.ndim == 0 else steps


@dataclass(frozen=True)
class SmoothedIndicator:
    params: KernelParams

    def coefficients(self, m):
        return fourier_coefficient(self.params, m)

    def __call__(self, x, M_eval: int | None = None):
        return evaluate_D(self.params, x, M_eval)


@dataclass(frozen=True)
class EvenWindow:
    """F(theta) = D(theta/2pi) + D(-theta/2pi) with cosine coefficients c_0..c_M.

    F = c_0 + sum_{m >= 1} 2 c_m cos(m theta).
    """

    params: KernelParams
    c: np.ndarray

    @property
    def M(self) -> int:
        return len(self.c) - 1

    def evaluate(self, theta):
        """Truncated cosine series through c_M."""
        return self.c[0] + _cos_sin_sum(2.0 * self.c[1:], None, theta)

    def exact(self, theta):
        theta = np.asarray(theta, dtype=float) / (2 * np.pi)
        return evaluate_D_exact(self.params, theta) + evaluate_D_exact(self.params, -theta)


def even_window_coefficients(params: KernelParams, M: int) -> np.ndarray:
    """c_0 = 2(B - A), c_m = a_m for 1 <= m <= M."""
    a, _ = fourier_coefficients(params, np.arange(M + 1))
    c = a.copy()
    c[0] = 2.0 * params.width
    return c


def even_window(params: KernelParams, M: int) -> EvenWindow:
    return EvenWindow(params, even_window_coefficients(params, M))


def truncation_tail_bound(params: KernelParams, M: int) -> float:
    """Sup-norm bound on F - sum_{k=0}^{M-2} (c_k - c_{k+2}) chi_k.

    That remainder equals sum_{j >= M-1} 2 c_j cos(j theta)
    + c_{M-1} chi_{M-3} + c_M chi_{M-2}, and |chi_k| <= k + 1.  With
    |c_j| <= C j^(-r-1), C = (2/pi)(r/(pi Delta))^r, and
    sum_{j >= M} j^(-r-1) <= (M-1)^(-r)/r this is at most

        C [2 (M-1)^(-r-1) + 2 (M-1)^(-r)/r + (M-1)^(-r) + M^(-r)],

    each term decreasing in M.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    C, r = _decay_constant(params), params.r
    return C * (2.0 * (M - 1) ** (-r - 1) + 2.0 * (M - 1) ** (-r) / r
                + (M - 1) ** (-r) + M ** (-r))
