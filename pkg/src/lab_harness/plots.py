"""
SVG figures for sweeps, decoupling batteries and packet layouts.
"""
from pathlib import Path
from typing import Optional, Union
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from decoupling.arc_ensemble import GrowthFit  # noqa: E402
from lab_harness.sweep import SweepReport  # noqa: E402
from wave_packets.decomposition import Decomposition  # noqa: E402

PathLike = Union[str, Path]

logger = logging.getLogger(__name__)


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.info(f"Saved figure {path}")
    return path


def plot_sweep(report: SweepReport, path: PathLike) -> Path:
    """log-log lp_norm, S and ratio against R, with fitted and predicted lines"""
    frame = report.to_frame().dropna(subset=["lp_norm", "ratio"])
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.8), dpi=120)
    R = frame["R"].to_numpy(dtype=float)
    for ax, quantity in zip(axes, ("lp_norm", "S", "ratio")):
        values = frame[quantity].to_numpy(dtype=float)
        ax.loglog(R, values, "o-", label=quantity)
        fit = report.fits.get(quantity)
        if fit is not None:
            ax.loglog(R, [fit.predict(r) for r in R], "--", label=f"fit slope {fit.slope:+.3f}")
        predicted = report.predicted.get(quantity)
        if predicted is not None and values.size:
            ax.loglog(R, values[0] * (R / R[0]) ** predicted, ":", label=f"predicted {predicted:+.3f}")
        ax.set_xlabel("R")
        ax.set_title(quantity)
        ax.legend(fontsize=8)
    fig.suptitle(f"{report.family}, p={report.p:g}, N rule {report.n_rule}, claim {report.claimed}")
    return _save(fig, path)


def plot_decoupling(frame: pd.DataFrame, fit: Optional[GrowthFit], path: PathLike) -> Path:
    """Every trial ratio and the per-delta maximum against 1/delta"""
    fig, ax = plt.subplots(figsize=(5.6, 4.4), dpi=120)
    inverse = 1.0 / frame["delta"].to_numpy(dtype=float)
    ax.loglog(inverse, frame["ratio"], ".", alpha=0.4, label="trials")
    maxima = frame.groupby("delta")["ratio"].max()
    ax.loglog(1.0 / maxima.index.to_numpy(dtype=float), maxima.to_numpy(), "o-", label="max")
    if fit is not None:
        xs = np.sort(1.0 / maxima.index.to_numpy(dtype=float))
        ax.loglog(xs, np.exp(fit.intercept) * xs ** fit.slope, "--", label=f"slope {fit.slope:+.3f}")
    ax.set_xlabel("1/delta")
    ax.set_ylabel("decoupling ratio")
    ax.legend()
    return _save(fig, path)


def plot_packets(decomp: Decomposition, path: PathLike, top: int = 200) -> Path:
    """Tube centres of the largest packets in the (theta, v) plane, sized by |c|"""
    order = np.argsort(-np.abs(decomp.coefficients))[:top]
    thetas = decomp.thetas[order]
    vs = decomp.vs[order]
    sizes = np.abs(decomp.coefficients[order])
    fig, ax = plt.subplots(figsize=(5.6, 4.4), dpi=120)
    if sizes.size:
        ax.scatter(vs, thetas, s=80 * sizes / sizes.max(), alpha=0.7)
    ax.set_xlabel("v")
    ax.set_ylabel("theta")
    ax.set_title(f"{decomp.profile.label}: {decomp.packet_count} packets, S={decomp.S:.3e}")
    return _save(fig, path)
