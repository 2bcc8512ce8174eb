"""Figure rendering for the report paths.

Every CLI command can write PNG figures next to its delimited output:
MSE-versus-n curves per error family for `simulate`, a BMSE bar chart for
`bootstrap`, and a coefficient/interval plot for `fit`.  Rendering uses
the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

PARAM_LABELS = {
    "beta0": r"$\beta_0$",
    "beta1": r"$\beta_1$",
    "beta2": r"$\beta_2$",
    "rho1": r"$\rho_1$",
}


def render_simulation_figures(rows, outdir) -> list:
    """One figure per error family: MSE vs n, a panel per parameter."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    families = sorted({row["family"] for row in rows})
    params = sorted({row["parameter"] for row in rows})
    written = []
    for family in families:
        fam_rows = [r for r in rows if r["family"] == family]
        estimators = sorted({r["estimator"] for r in fam_rows})
        ncols = 2
        nrows = (len(params) + ncols - 1) // ncols
        fig, axes = plt.subplots(nrows, ncols, figsize=(9, 3.2 * nrows), squeeze=False)
        for k, param in enumerate(params):
            ax = axes[k // ncols][k % ncols]
            for est in estimators:
                pts = sorted(
                    (r["n"], r["mse"]) for r in fam_rows
                    if r["parameter"] == param and r["estimator"] == est
                )
                ax.plot([p[0] for p in pts], [p[1] for p in pts],
                        marker="o", label=est)
            ax.set_xlabel("n")
            ax.set_ylabel("MSE")
            ax.set_title(PARAM_LABELS.get(param, param))
        for k in range(len(params), nrows * ncols):
            axes[k // ncols][k % ncols].axis("off")
        axes[0][0].legend(fontsize=8)
        fig.suptitle(f"Empirical MSE, errors: {family}")
        fig.tight_layout()
        path = outdir / f"mse_{family}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def render_bootstrap_figure(rows, outdir, loss_label: str) -> Path:
    """Bar chart of per-parameter bootstrap MSD around the full-data fit."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = [r["parameter"] for r in rows]
    values = [r["bmse"] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(range(len(names)), values)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right")
    ax.set_ylabel("BMSE")
    ax.set_title(f"Bootstrap MSE ({loss_label})")
    fig.tight_layout()
    path = outdir / f"bmse_{loss_label.replace(':', '_').replace('=', '')}.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_fit_figure(report: dict, outdir) -> Path:
    """Point estimates with Wald intervals from a fit report."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = list(report["estimates"])
    est = [report["estimates"][n]["estimate"] for n in names]
    lo = [report["estimates"][n]["ci_low"] for n in names]
    hi = [report["estimates"][n]["ci_high"] for n in names]
    ypos = range(len(names))
    fig, ax = plt.subplots(figsize=(7, 0.5 * len(names) + 1.5))
    ax.errorbar(est, ypos,
                xerr=[[e - l for e, l in zip(est, lo)], [h - e for e, h in zip(est, hi)]],
                fmt="o", capsize=3)
    ax.axvline(0.0, color="grey", lw=0.8)
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlabel("estimate")
    ax.set_title(f"{report['loss']['name']} fit, {int(100 * report['ci_level'])}% intervals")
    fig.tight_layout()
    path = outdir / "coefficients.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
