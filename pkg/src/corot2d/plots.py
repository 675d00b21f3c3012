"""Figure rendering for the CLI report path.

Every command that writes a delimited table can also render the matching
figure next to it.  The CSV files remain the canonical machine-readable
output; figures are derived views and nothing reads them back.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_run(data: dict[str, np.ndarray], outdir: str | Path) -> list[Path]:
    """Energy, gradient-norm and third-derivative panels from diag columns."""
    outdir = Path(outdir)
    t = data["t"]
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, data["energy"], label=r"$\|v\|_2^2 + \|S\|_2^2$")
    ax.plot(t, data["energy_i"], "--", label=r"$+\,\varepsilon\|\nabla S\|_2^2$")
    ax.plot(t, np.abs(data["energy_ii_residual"]), ":", label="balance residual")
    ax.set_xlabel("t")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_title("energies")
    paths.append(_save(fig, outdir / "energy.png"))

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, data["x_grad"], label=r"$X=\|\nabla v\|^2+\|\nabla S\|^2$")
    ax.plot(t, data["y_e"], label=r"$Y_e$")
    ax.plot(t, data["lap_s_l2sq"], label=r"$\|\Delta S\|^2$")
    ax.plot(t, data["s_linf"], label=r"$\|S\|_\infty$")
    ax.set_xlabel("t")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_title("gradient norms")
    paths.append(_save(fig, outdir / "norms.png"))

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, np.abs(data["appendix_b"]) + 1e-300, label="|B(t)|")
    ax.plot(t, data["d3v_l2"], label=r"$\|D^3 v\|_2$")
    ax.plot(t, data["d3s_l2"], label=r"$\|D^3 S\|_2$")
    ax.set_xlabel("t")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.set_title("third-derivative monitor")
    paths.append(_save(fig, outdir / "appendix.png"))
    return paths


def plot_mms(spatial: list[dict], temporal: list[dict], outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    paths = []

    fig, ax = plt.subplots(figsize=(5, 4))
    ns = [r["n1"] for r in spatial]
    errs = [max(r["err"], 1e-300) for r in spatial]
    ax.loglog(ns, errs, "o-")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$L^2$ error")
    ax.set_title("grid refinement (floor once resolved)")
    paths.append(_save(fig, outdir / "mms_spatial.png"))

    fig, ax = plt.subplots(figsize=(5, 4))
    dts = np.array([r["dt"] for r in temporal])
    errs = np.array([max(r["err"], 1e-300) for r in temporal])
    ax.loglog(dts, errs, "o-", label="measured")
    ax.loglog(dts, errs[0] * (dts / dts[0]) ** 4, "k--", label=r"$\propto dt^4$")
    ax.set_xlabel("dt")
    ax.set_ylabel(r"$L^2$ error")
    ax.legend(fontsize=8)
    ax.set_title("step refinement")
    paths.append(_save(fig, outdir / "mms_temporal.png"))
    return paths


def plot_galerkin(rows, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    fig, ax = plt.subplots(figsize=(5, 4))
    ns = [r.n_coarse for r in rows]
    ax.loglog(ns, [max(r.sup_diff_v, 1e-300) for r in rows], "o-", label=r"$\sup_t\|v_N-v_{2N}\|_2$")
    ax.loglog(ns, [max(r.sup_diff_s, 1e-300) for r in rows], "s-", label=r"$\sup_t\|S_N-S_{2N}\|_2$")
    ax.set_xlabel("N")
    ax.legend(fontsize=8)
    ax.set_title("truncation refinement")
    return [_save(fig, outdir / "galerkin.png")]


def plot_bglab(report, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(report.fit_ratios, "o", ms=3, label="fit ensemble")
    ax.plot(report.holdout_ratios, "x", ms=3, label="holdout ensemble")
    ax.axhline(report.fitted_constant, color="k", lw=1, label="fitted constant")
    ax.axhline(report.margin * report.fitted_constant, color="r", lw=1, ls="--",
               label=f"{report.margin:g} x fitted")
    ax.set_xlabel("field index")
    ax.set_ylabel("ratio")
    ax.legend(fontsize=8)
    ax.set_title("log-Sobolev ratio ensembles")
    return [_save(fig, outdir / "bglab.png")]


def plot_blowup(unreg: dict[str, np.ndarray], reg: dict[str, np.ndarray],
                eps: float, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(unreg["t"], unreg["d3s_l2"], label="eps = 0")
    ax.semilogy(reg["t"], reg["d3s_l2"], label=f"diffusive eps = {eps:g}")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\|D^3 S\|_2$")
    ax.legend(fontsize=8)
    ax.set_title("third-derivative growth contrast")
    return [_save(fig, outdir / "blowup.png")]
