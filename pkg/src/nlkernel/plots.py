"""Static SVG figures with a CSV table beside each one.

SVG output is byte-deterministic: the id salt is fixed and no date is
written into the metadata.
"""
from __future__ import annotations

import csv
import re
import warnings
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {"svg.hashsalt": "nlkernel", "svg.fonttype": "path", "path.simplify": False}


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text.replace(".", "p")).strip("_")


def _save(fig, path: Path) -> Path:
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def _write_table(path: Path, header, rows) -> Path:
    try:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(header)
            for row in rows:
                out.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                              for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def error_curves(report, kernel: str, nsr: float, outdir) -> tuple[Path, Path]:
    """Log-log mean error against dx, one line per regulariser."""
    outdir = Path(outdir)
    stem = outdir / f"errors_{_slug(kernel)}_nsr{_slug(repr(float(nsr)))}"
    regs = sorted({r for k, s, r in report.groups() if k == kernel and s == nsr})
    rows = []
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.5))
        for reg in regs:
            dxs, means = report.mean_errors(kernel, nsr, reg)
            rows.extend((reg, float(d), float(m)) for d, m in zip(dxs, means))
            ax.loglog(dxs, means, "o-", label=reg)
        ax.set_xlabel("dx")
        ax.set_ylabel("relative L2(rho) error")
        ax.set_title(f"{kernel}, nsr = {nsr:g}")
        ax.legend()
        fig.tight_layout()
        svg = _save(fig, stem.with_suffix(".svg"))
    return svg, _write_table(stem.with_suffix(".csv"), ["regularizer", "dx", "mean_error"], rows)


def emit_plots(report, outdir) -> list[Path]:
    """One error-curve SVG and CSV per (kernel, nsr) present in the report."""
    if len(report) == 0:
        warnings.warn("empty report; no figures written", UserWarning, stacklevel=2)
        return []
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    for kernel, nsr in sorted({(k, s) for k, s, _ in report.groups()}):
        files.extend(error_curves(report, kernel, nsr, outdir))
    return files


def estimate_overlay(estimate, truth, rho, path) -> tuple[Path, Path]:
    """Estimated kernel against the truth (if given) with rho on a second axis."""
    path = Path(path)
    r = rho.r
    est = np.asarray(estimate(r), dtype=float)
    cols = [r, est]
    header = ["r", "estimate"]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(r, est, label="estimate")
        if truth is not None:
            tv = np.asarray(truth(r), dtype=float)
            ax.plot(r, tv, "--", label="truth")
            cols.append(tv)
            header.append("truth")
        ax2 = ax.twinx()
        ax2.fill_between(r, rho.weights, alpha=0.2, color="grey")
        ax2.set_ylabel("rho")
        cols.append(rho.weights)
        header.append("rho")
        ax.set_xlabel("r")
        ax.legend()
        fig.tight_layout()
        svg = _save(fig, path.with_suffix(".svg"))
    return svg, _write_table(path.with_suffix(".csv"), header, zip(*cols))


def lcurve_plot(curve, lam0: float, path) -> tuple[Path, Path]:
    path = Path(path)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.5))
        ax.plot(curve.x, curve.y, ".-")
        i = int(np.argmin(np.abs(curve.lambdas - lam0)))
        ax.plot(curve.x[i], curve.y[i], "o", color="red", label=f"lambda0 = {lam0:.3g}")
        ax.set_xlabel("log E")
        ax.set_ylabel("log R")
        ax.legend()
        fig.tight_layout()
        svg = _save(fig, path.with_suffix(".svg"))
    rows = zip(curve.lambdas, curve.x, curve.y, curve.curvature)
    return svg, _write_table(path.with_suffix(".csv"), ["lambda", "logE", "logR", "curvature"], rows)


def dispersion_plot(ks, omega, group_velocity, path, labels=("omega", "group velocity")) -> tuple[Path, Path]:
    path = Path(path)
    with plt.rc_context(_STYLE):
        fig, (a1, a2) = plt.subplots(1, 2, figsize=(8, 3.2))
        a1.plot(ks, omega)
        a1.set_xlabel("k")
        a1.set_ylabel(labels[0])
        a2.plot(ks, group_velocity)
        a2.set_xlabel("k")
        a2.set_ylabel(labels[1])
        fig.tight_layout()
        svg = _save(fig, path.with_suffix(".svg"))
    return svg, _write_table(path.with_suffix(".csv"), ["k", "omega", "group_velocity"],
                             zip(ks, omega, group_velocity))
