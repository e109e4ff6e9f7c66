"""SU(2) characters, the Sato-Tate measure, and the cosine-to-character basis change."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# below this |sin(theta)| the ratio sin((k+1)theta)/sin(theta) is replaced by
# the exponential sum
SIN_CUTOFF = 1e-6
GL_PANELS = 2048
GL_NODES = 8


def _character_sum(k: int, theta):
    # sum_{j=0}^{k} e^{i(k-2j)theta} = sum_j cos((k-2j)theta)
    j = np.arange(k + 1)
    return np.cos(np.multiply.outer(np.asarray(theta, dtype=float), k - 2 * j)).sum(axis=-1)


def su2_character(k: int, theta):
    """chi_k(theta) = sin((k+1) theta) / sin(theta), the trace on Sym^k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    near = np.abs(s) < SIN_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin((k + 1) * theta) / s
    if np.any(near):
        out = np.where(near, _character_sum(k, theta), out)
    return float(out) if out.ndim == 0 else out


def character_table(kmax: int, theta) -> np.ndarray:
    """Array ``T[k, i] = chi_k(theta_i)`` for 0 <= k <= kmax, by the recurrence
    chi_{k+1} = 2 cos(theta) chi_k - chi_{k-1}."""
    theta = np.asarray(theta, dtype=float).ravel()
    T = np.empty((kmax + 1, theta.size))
    T[0] = 1.0
    if kmax >= 1:
        two_cos = 2.0 * np.cos(theta)
        T[1] = two_cos
        for k in range(1, kmax):
            T[k + 1] = two_cos * T[k] - T[k - 1]
    return T


@dataclass(frozen=True)
class CharacterExpansion:
    """F ~ sum_{k=0}^{M-2} d_k chi_k with sup-norm remainder at most ``tail``."""

    M: int
    d: np.ndarray
    tail: float = float("nan")

    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=float)
        vals = self.d @ character_table(len(self.d) - 1, theta)
        return vals.reshape(theta.shape) if theta.ndim else float(vals[0])

    def to_fourier(self) -> np.ndarray:
        return character_to_fourier(self.d)


def fourier_to_character(c, tail: float = float("nan")) -> CharacterExpansion:
    """d_k = c_k - c_{k+2} for 0 <= k <= M - 2, where c = (c_0, ..., c_M)."""
    c = np.asarray(c, dtype=float)
    M = len(c) - 1
    if M < 2:
        raise ValueError("need at least c_0, c_1, c_2")
    return CharacterExpansion(M, c[:-2] - c[2:], tail)


def character_to_fourier(d) -> np.ndarray:
    """Inverse of the basis change for a finite sum: c_k = d_k + d_{k+2} + ...

    Returns c_0..c_K for K = len(d) - 1.
    """
    d = np.asarray(d, dtype=float)
    c = np.zeros_like(d)
    for parity in (0, 1):
        c[parity::2] = np.cumsum(d[parity::2][::-1])[::-1]
    return c


def st_measure_interval(a: float, b: float) -> float:
    """Sato-Tate mass of [a, b] within [0, pi]."""
    if not 0.0 <= a <= b <= np.pi:
        raise ValueError(f"need 0 <= a <= b <= pi, got [{a}, {b}]")
    return ((b - np.sin(b) * np.cos(b)) - (a - np.sin(a) * np.cos(a))) / np.pi


def st_measure_character(k: int) -> float:
    return 1.0 if k == 0 else 0.0


def st_density(theta):
    return (2.0 / np.pi) * np.sin(theta) ** 2


def gauss_legendre(f, a: float, b: float, panels: int = GL_PANELS, nodes: int = GL_NODES) -> float:
    """Composite Gauss-Legendre quadrature of a vectorised ``f`` over [a, b]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return float(np.dot(wts, f(pts)))


def st_integral(f, panels: int = GL_PANELS) -> float:
    """mu_ST(f) = int_0^pi (2/pi) sin^2 f."""
    return gauss_legendre(lambda t: st_density(t) * f(t), 0.0, np.pi, panels)
