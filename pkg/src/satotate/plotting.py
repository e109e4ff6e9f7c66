"""Figures written next to the CSV/JSON artifacts of the report commands.

PNG output is byte-stable: the Agg backend, fixed rc settings and no
Software/date metadata.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harmonics import st_density  # noqa: E402

RC = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "lines.linewidth": 1.2,
    "savefig.dpi": 120,
    "path.simplify": False,
}
FIGSIZE = (5.5, 3.4)


def _png_bytes(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="png", metadata={"Software": None}, bbox_inches=None)
    plt.close(fig)
    return buf.getvalue()


def angle_histogram(theta, title: str = "", bins: int = 40) -> bytes:
    """Histogram of Frobenius angles against the Sato-Tate density."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        ax.hist(theta, bins=bins, range=(0, np.pi), density=True, color="0.75",
                edgecolor="0.4", linewidth=0.4, label=f"angles ({len(theta)} primes)")
        t = np.linspace(0, np.pi, 400)
        ax.plot(t, st_density(t), color="C3", label=r"$(2/\pi)\sin^2\theta$")
        ax.set_xlim(0, np.pi)
        ax.set_xticks([0, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi],
                      ["0", r"$\pi/4$", r"$\pi/2$", r"$3\pi/4$", r"$\pi$"])
        ax.set_xlabel(r"$\theta_p$")
        ax.set_ylabel("density")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False, loc="upper right")
        fig.tight_layout()
        return _png_bytes(fig)


def coefficient_plot(m, a, b, bound, title: str = "") -> bytes:
    """|a_m|, |b_m| and the coefficient bound on log-log axes."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        tiny = 1e-300
        ax.loglog(m, np.abs(a) + tiny, ".", ms=1.5, color="C0", label=r"$|a_m|$")
        ax.loglog(m, np.abs(b) + tiny, ".", ms=1.5, color="C1", label=r"$|b_m|$")
        ax.loglog(m, bound, color="k", label="bound")
        lo = max(np.min(bound) * 1e-3, 1e-18)
        ax.set_ylim(lo, 2 * np.max(bound))
        ax.set_xlabel("m")
        ax.set_ylabel("coefficient size")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        return _png_bytes(fig)


def discrepancy_plot(xs, observed, main, ratio, title: str = "") -> bytes:
    """Observed counts vs. main term, and the normalised discrepancy."""
    with plt.rc_context(RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(FIGSIZE[0] * 1.6, FIGSIZE[1]))
        ax1.loglog(xs, observed, "o-", color="C0", label="observed")
        ax1.loglog(xs, main, "s--", color="C3", label=r"$\mu_{ST}(I)\,\mathrm{Li}(x)$")
        ax1.set_xlabel("x")
        ax1.set_ylabel("count")
        ax1.legend(frameon=False)
        ax2.semilogx(xs, ratio, "o-", color="C2")
        ax2.set_xlabel("x")
        ax2.set_ylabel("|difference| / normalizer")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        return _png_bytes(fig)


def joint_scatter(theta1, theta2, title: str = "") -> bytes:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.0, 4.0))
        ax.plot(theta1, theta2, ",", color="C0", alpha=0.6)
        ax.set_xlim(0, np.pi)
        ax.set_ylim(0, np.pi)
        ax.set_xlabel(r"$\theta_{1,p}$")
        ax.set_ylabel(r"$\theta_{2,p}$")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _png_bytes(fig)
