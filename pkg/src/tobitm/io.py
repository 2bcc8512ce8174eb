"""CSV ingestion, fit requests, and machine-readable reports.

Files are comma-separated UTF-8 with a header row and '.' decimals, the
format the public Mroz distribution uses.  Floats are written with
``repr`` so a written table parses back to bit-identical values.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from . import __version__
from .bootstrap import bootstrap_bmse
from .covariance import beta_covariance, wald_intervals
from .data import Dataset, censoring_fraction, dataset_from_columns
from .errors import DataError
from .estimator import fit
from .losses import loss_from_spec
from .montecarlo import DgpConfig, run_experiment
from .simplex import SimplexConfig

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ColumnRoles:
    """Which CSV column plays which part in the model."""

    response: str
    exog: tuple
    endog: str
    instrument: str

    def __post_init__(self):
        object.__setattr__(self, "exog", tuple(self.exog))
        names = [self.response, *self.exog, self.endog, self.instrument]
        if len(set(names)) != len(names):
            raise DataError(f"column roles must be disjoint, got {names}")

    def all_columns(self) -> list:
        return [self.response, *self.exog, self.endog, self.instrument]


@dataclass(frozen=True)
class FitRequest:
    csv_path: str
    roles: ColumnRoles
    loss_spec: str = "clad"
    threshold: float = 0.0
    ci_level: float = 0.95
    nm_cfg: SimplexConfig = field(default_factory=SimplexConfig)
    seed: int = 0


def _numeric_column(frame: pd.DataFrame, name: str) -> np.ndarray:
    # float() round-trips repr-written values exactly; pandas' fast parser does not
    raw = frame[name].tolist()
    values = np.empty(len(raw))
    bad = []
    for i, cell in enumerate(raw):
        text = str(cell).strip()
        try:
            v = float(text) if text else float("nan")
        except ValueError:
            bad.append(i)
            continue
        values[i] = v
        if not np.isfinite(v):
            bad.append(i)
    if bad:
        raise DataError(
            f"missing or unparsable value in column {name!r} at row(s) {bad[:10]}"
        )
    return values


def read_csv(path, roles: ColumnRoles, c: float = 0.0) -> Dataset:
    """Read the role columns of a headed CSV into a validated Dataset.

    An intercept is prepended to the exogenous block.  Missing columns,
    empty files, and unparsable cells raise DataError with the offending
    column and row indices.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, comment="#")
    except pd.errors.EmptyDataError:
        raise DataError(f"empty file: {path}") from None
    if frame.empty and frame.columns.empty:
        raise DataError(f"empty file: {path}")
    missing = [name for name in roles.all_columns() if name not in frame.columns]
    if missing:
        raise DataError(f"missing column(s) {missing} in {path}")

    y = _numeric_column(frame, roles.response)
    if roles.exog:
        X = np.column_stack([_numeric_column(frame, name) for name in roles.exog])
    else:
        X = np.empty((y.shape[0], 0))
    w = _numeric_column(frame, roles.endog)
    z1 = _numeric_column(frame, roles.instrument)
    return dataset_from_columns(y, X, w, z1, c=c, prepend_intercept=True)


def write_dataset_csv(ds: Dataset, path, roles: Optional[ColumnRoles] = None) -> None:
    """Write a Dataset with exact float round-trip (intercept column omitted)."""
    if roles is None:
        exog = tuple(f"x{j}" for j in range(1, ds.p))
        roles = ColumnRoles(response="y", exog=exog, endog="w", instrument="z1")
    if len(roles.exog) != ds.p - 1:
        raise DataError(f"roles name {len(roles.exog)} exogenous columns, "
                        f"dataset has {ds.p - 1} beyond the intercept")
    header = [roles.response, *roles.exog, roles.endog, roles.instrument]
    body = np.column_stack([ds.y, ds.X_exo[:, 1:], ds.w, ds.z1])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in body:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def config_hash(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def beta_names(roles: ColumnRoles) -> list:
    return ["intercept", *roles.exog, roles.endog, "residual"]


def delta_names(roles: ColumnRoles) -> list:
    return [roles.instrument, "intercept", *roles.exog]


def fit_command(req: FitRequest) -> dict:
    """Run a two-stage fit from a CSV and return the JSON-ready report."""
    loss = loss_from_spec(req.loss_spec)
    ds = read_csv(req.csv_path, req.roles, c=req.threshold)
    mfit = fit(ds, loss, req.nm_cfg)
    report = beta_covariance(mfit)
    cis = wald_intervals(report, req.ci_level)

    bnames = beta_names(req.roles)
    dnames = delta_names(req.roles)
    beta = mfit.beta_hat.to_array()

    estimates = {}
    for j, name in enumerate(bnames):
        estimates[name] = {
            "estimate": float(beta[j]),
            "se": float(report.se[j]),
            "ci_low": float(cis[j, 0]),
            "ci_high": float(cis[j, 1]),
        }

    payload = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "tobitm", "version": __version__},
        "seed": req.seed,
        "loss": {"name": loss.name, "params": loss.params},
        "threshold": ds.c,
        "ci_level": req.ci_level,
        "n": ds.n,
        "p": ds.p,
        "censoring_fraction": censoring_fraction(ds),
        "first_stage": {
            "coefficients": {name: float(v)
                             for name, v in zip(dnames, mfit.first_stage.delta_hat.delta)},
        },
        "estimates": estimates,
        "objective": mfit.objective_value,
        "score_norm": mfit.score_norm,
        "bandwidth_h": report.bandwidth_h,
        "optimizer": {
            "iterations": mfit.opt.iters,
            "converged": bool(mfit.opt.converged),
            "passes": len(mfit.opt.restart_history),
            "failed_starts": len(mfit.opt.start_errors),
        },
    }
    payload["config_hash"] = config_hash({
        "csv": str(req.csv_path), "roles": req.roles.all_columns(),
        "loss": req.loss_spec, "threshold": req.threshold,
        "ci_level": req.ci_level, "seed": req.seed,
    })
    return payload


def _meta_line(kind: str, seed: int, extra: Optional[dict] = None) -> str:
    parts = [f"# tobitm-{kind}", f"schema={SCHEMA_VERSION}", f"version={__version__}",
             f"seed={seed}"]
    for key, value in (extra or {}).items():
        parts.append(f"{key}={value}")
    return " ".join(parts)


def write_table(path, fieldnames: Sequence[str], rows: Sequence[dict], meta: str) -> None:
    def cell(v):
        return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(meta + "\n")
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(cell(row[name]) for name in fieldnames) + "\n")


SIM_FIELDS = ("estimator", "family", "n", "parameter", "bias", "mse",
              "censoring_probability")


def simulate_rows(loss_specs: Sequence[str], families: Sequence[str],
                  ns: Sequence[int], reps: int, seed: int,
                  nm_cfg: Optional[SimplexConfig] = None, jobs: int = 1) -> list:
    """Long-format bias/MSE rows over a loss x family x n grid."""
    rows = []
    for spec in loss_specs:
        loss = loss_from_spec(spec)
        for family in families:
            for n in ns:
                cfg = DgpConfig(n=int(n), error_family=family, seed=seed)
                rep = run_experiment(cfg, loss, reps, nm_cfg=nm_cfg, jobs=jobs)
                for j, pname in enumerate(rep.param_names):
                    rows.append({
                        "estimator": rep.estimator,
                        "family": rep.family,
                        "n": rep.n,
                        "parameter": pname,
                        "bias": float(rep.bias[j]),
                        "mse": float(rep.mse[j]),
                        "censoring_probability": rep.mean_censoring,
                    })
    return rows


def simulate_command(loss_specs, families, ns, reps, seed, out_path,
                     nm_cfg=None, jobs=1) -> list:
    rows = simulate_rows(loss_specs, families, ns, reps, seed, nm_cfg, jobs)
    meta = _meta_line("simulate", seed, {
        "reps": reps,
        "config": config_hash({"loss": list(loss_specs), "families": list(families),
                               "ns": [int(n) for n in ns], "reps": reps, "seed": seed}),
    })
    write_table(out_path, SIM_FIELDS, rows, meta)
    return rows


BOOT_FIELDS = ("parameter", "estimate", "bmse")


def bootstrap_command(req: FitRequest, B: int, out_path, jobs: int = 1) -> list:
    loss = loss_from_spec(req.loss_spec)
    ds = read_csv(req.csv_path, req.roles, c=req.threshold)
    report = bootstrap_bmse(ds, loss, B, req.seed, nm_cfg=req.nm_cfg, jobs=jobs)
    names = beta_names(req.roles)
    rows = [{"parameter": name,
             "estimate": float(report.theta_hat[j]),
             "bmse": float(report.bmse[j])}
            for j, name in enumerate(names)]
    meta = _meta_line("bootstrap", req.seed, {
        "B": B,
        "failures": report.failures,
        "loss": req.loss_spec,
        "config": config_hash({"csv": str(req.csv_path), "loss": req.loss_spec,
                               "B": B, "seed": req.seed}),
    })
    write_table(out_path, BOOT_FIELDS, rows, meta)
    return rows
