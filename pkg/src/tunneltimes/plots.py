"""Figure rendering for scenario reports and field scans.

Figures are written straight to files (Agg backend, no display); the CLI
drops them next to the CSV output unless asked not to.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .barriers import BarrierStack, SmoothBarrier  # noqa: E402
from .traversal import ScanResult, TraversalReport  # noqa: E402
from .wavepackets import MomentumDensity  # noqa: E402

__all__ = ["scenario_figure", "scan_figure"]


def _plot_density_panel(ax, density: MomentumDensity, kappa_min: float, kappa_max: float):
    lo, hi = density.support
    pad = 0.15 * (hi - lo)
    ks = np.linspace(max(lo - pad, 0.0), hi + pad, 600)
    ax.plot(ks, density(ks), lw=1.6, color="tab:blue")
    if kappa_max > 0:
        ax.axvline(kappa_max, color="tab:red", ls="--", lw=1.0,
                   label=r"$\kappa_{\max}$")
        if kappa_min > 0 and kappa_min != kappa_max:
            ax.axvline(kappa_min, color="tab:orange", ls=":", lw=1.0,
                       label=r"$\kappa_{\min}$")
        ax.legend(fontsize=8, loc="best")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$|\tilde\psi(k)|^2$")
    ax.set_title("momentum density vs. barrier wavenumbers", fontsize=10)


def _plot_barrier_panel(ax, barrier):
    if isinstance(barrier, BarrierStack):
        edges = barrier.edges()
        qs = np.linspace(edges[0] - 0.5 * barrier.right_edge, 0.0, 800)
        ax.step(qs, barrier.potential(qs), where="post", color="0.3", lw=1.4)
        ax.set_xlabel("q")
    elif isinstance(barrier, SmoothBarrier):
        b, a = barrier.support
        xs = np.linspace(b, a, 800)
        ax.plot(-xs, barrier.v(xs), color="0.3", lw=1.4)
        ax.set_xlabel("q")
    ax.set_ylabel("V")
    ax.set_title("barrier profile", fontsize=10)


def scenario_figure(path, density: MomentumDensity, barrier,
                    report: TraversalReport | None = None) -> None:
    """Two-panel overview: momentum density vs. kappa lines, barrier shape."""
    if isinstance(barrier, BarrierStack):
        kmin, kmax = barrier.kappa_min, barrier.kappa_max
    else:
        kmin, kmax = 0.0, barrier.kappa_max
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9.0, 3.4))
    _plot_density_panel(ax0, density, kmin, kmax)
    _plot_barrier_panel(ax1, barrier)
    if report is not None:
        fig.suptitle(
            f"regime: {report.regime.value}   "
            rf"$\tau_{{trav}}$={report.tau_trav:.6g}  "
            rf"$\tau_{{part}}$={report.tau_part:.6g}  "
            rf"$\tau_{{non}}$={report.tau_non:.6g}",
            fontsize=10,
        )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def scan_figure(path, scan: ScanResult, param_name: str = "field") -> None:
    """Partial-traversal time against the scanned parameter."""
    fields = [e.field for e in scan.entries]
    taus = [e.tau_part for e in scan.entries]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(fields, taus, "o-", color="tab:blue", ms=4)
    ax.set_xlabel(f"{param_name} (au)")
    ax.set_ylabel(r"$\tau_{part}$ (au)")
    trend = "monotone decreasing" if scan.tau_part_strictly_decreasing else "non-monotone"
    ax.set_title(f"partial traversal time vs. {param_name} ({trend})", fontsize=10)
    ax.grid(True, ls=":", lw=0.6, alpha=0.6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
