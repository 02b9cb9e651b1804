"""Convergence sweeps over mesh size, noise level, kernel and regulariser.

Every cell (kernel, dx, nsr, replicate) is a pure function of the config and
the seed: its noise stream is derived from a hash of the cell key, so cells
can run in any order or in separate processes. Finished cells are stored as
JSON under ``<output_dir>/cells`` and skipped on a rerun.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSpec, NLKernelError
from .grid import NoiseSpec, add_noise
from .operator import TrueKernelSpec, make_true_kernel
from .pipeline import fit, prepare
from .solve import RegularizerKind, relative_l2rho_error
from .synthetic import DOMAIN, synthetic_dataset

REPORT_COLUMNS = ["kernel", "dx", "nsr", "regularizer", "replicate", "status",
                  "n", "lambda", "loss", "error"]
RATE_COLUMNS = ["kernel", "nsr", "regularizer", "rate", "rate_mean", "rate_std", "cells"]


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class ExperimentConfig:
    kernels: tuple[TrueKernelSpec, ...] = (TrueKernelSpec("gaussian"),)
    dx_ladder: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025, 0.0125)
    nsr_ladder: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)
    replicates: int = 1
    degree: int = 2
    regularizers: tuple[RegularizerKind, ...] = tuple(RegularizerKind)
    seed: int = 0
    output_dir: str = "sweep"
    domain: tuple[float, float] = DOMAIN
    n_pairs: int = 2
    workers: int = 1

    def __post_init__(self):
        kernels = self.kernels
        if isinstance(kernels, TrueKernelSpec):
            kernels = (kernels,)
        object.__setattr__(self, "kernels", tuple(kernels))
        object.__setattr__(self, "dx_ladder", tuple(float(v) for v in self.dx_ladder))
        object.__setattr__(self, "nsr_ladder", tuple(float(v) for v in self.nsr_ladder))
        object.__setattr__(self, "regularizers",
                           tuple(RegularizerKind.parse(r) for r in self.regularizers))
        object.__setattr__(self, "domain", tuple(float(v) for v in self.domain))
        if not self.kernels:
            raise InvalidSpec("at least one kernel is required")
        if not self.dx_ladder or any(not v > 0 for v in self.dx_ladder):
            raise InvalidSpec("dx_ladder entries must be positive")
        if any(not v >= 0 for v in self.nsr_ladder):
            raise InvalidSpec("nsr_ladder entries must be nonnegative")
        if self.replicates < 1:
            raise InvalidSpec("replicates must be at least 1")
        if self.degree < 0:
            raise InvalidSpec("degree must be nonnegative")
        if not self.regularizers:
            raise InvalidSpec("at least one regularizer is required")
        if not self.domain[1] > self.domain[0]:
            raise InvalidSpec("domain must be an increasing pair")
        if self.n_pairs < 1 or self.workers < 1:
            raise InvalidSpec("n_pairs and workers must be positive")

    def to_json(self) -> dict:
        return {
            "kernels": [k.to_json() for k in self.kernels],
            "dx_ladder": list(self.dx_ladder),
            "nsr_ladder": list(self.nsr_ladder),
            "replicates": self.replicates,
            "degree": self.degree,
            "regularizers": [r.value for r in self.regularizers],
            "seed": self.seed,
            "output_dir": self.output_dir,
            "domain": list(self.domain),
            "n_pairs": self.n_pairs,
            "workers": self.workers,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        obj = dict(obj)
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known - {"kernel"}
        if unknown:
            raise InvalidSpec(f"unknown config keys: {sorted(unknown)}")
        if "kernel" in obj:
            obj.setdefault("kernels", [obj.pop("kernel")])
        if "kernels" in obj:
            obj["kernels"] = tuple(TrueKernelSpec.from_json(k) if isinstance(k, (dict, str))
                                   else k for k in obj["kernels"])
        try:
            return cls(**obj)
        except (TypeError, ValueError) as exc:
            raise InvalidSpec(f"invalid experiment config: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class Cell:
    kernel: TrueKernelSpec
    dx: float
    nsr: float
    replicate: int

    def key(self, cfg: ExperimentConfig) -> dict:
        return {
            "kernel": self.kernel.to_json(), "dx": self.dx, "nsr": self.nsr,
            "replicate": self.replicate, "seed": cfg.seed, "degree": cfg.degree,
            "regularizers": [r.value for r in cfg.regularizers],
            "domain": list(cfg.domain), "n_pairs": cfg.n_pairs,
        }

    def digest(self, cfg: ExperimentConfig) -> str:
        blob = json.dumps(self.key(cfg), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:20]


def cells(cfg: ExperimentConfig) -> list[Cell]:
    return [Cell(k, dx, nsr, rep) for k in cfg.kernels for dx in cfg.dx_ladder
            for nsr in cfg.nsr_ladder for rep in range(cfg.replicates)]


def kernel_label(spec: TrueKernelSpec) -> str:
    if not spec.parameters:
        return spec.kind
    inner = ";".join(f"{k}={spec.parameters[k]}" for k in sorted(spec.parameters))
    return f"{spec.kind}({inner})"


def noise_seed(cfg: ExperimentConfig, cell: Cell) -> int:
    """A 63-bit seed derived from the global seed and the cell's noise coordinates."""
    coords = json.dumps({"kernel": cell.kernel.to_json(), "dx": cell.dx, "nsr": cell.nsr,
                         "replicate": cell.replicate, "domain": list(cfg.domain),
                         "n_pairs": cfg.n_pairs}, sort_keys=True).encode()
    h = int.from_bytes(hashlib.sha256(coords).digest()[:8], "little")
    state = np.random.SeedSequence([cfg.seed, h]).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def run_cell(cfg: ExperimentConfig, cell: Cell) -> list[dict]:
    """Learn with every configured regulariser from one noisy dataset.

    The support radius is estimated from the noiseless data; noise on f
    would otherwise push the thresholded f-support to the domain edge.
    """
    base = {"kernel": kernel_label(cell.kernel), "dx": cell.dx, "nsr": cell.nsr,
            "replicate": cell.replicate}
    rows = []
    try:
        phi = make_true_kernel(cell.kernel)
        clean = synthetic_dataset(cell.kernel, cell.dx, cfg.domain, cfg.n_pairs)
        R = prepare(clean).R
        data = add_noise(clean, NoiseSpec(cell.nsr, noise_seed(cfg, cell)))
        prep = prepare(data, support_radius=R)
    except NLKernelError as exc:
        return [dict(base, regularizer=r.value, status=f"failed: {type(exc).__name__}",
                     n=0, **{"lambda": math.nan}, loss=math.nan, error=math.nan)
                for r in cfg.regularizers]
    for reg in cfg.regularizers:
        row = dict(base, regularizer=reg.value)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                est = fit(prep, reg, cfg.degree)
            row.update(status="ok", n=est.diagnostics["n"], loss=float(est.loss),
                       error=relative_l2rho_error(est, phi, prep.rho))
            row["lambda"] = float(est.lam)
        except NLKernelError as exc:
            row.update(status=f"failed: {type(exc).__name__}", n=0, loss=math.nan,
                       error=math.nan)
            row["lambda"] = math.nan
        rows.append(row)
    return rows


def _run_cell_job(args):
    cfg, cell = args
    return run_cell(cfg, cell)


def loglog_slope(dx, err) -> float:
    """Least-squares slope of log(err) against log(dx); NaN with fewer than 2 usable points."""
    dx, err = np.asarray(dx, float), np.asarray(err, float)
    ok = np.isfinite(err) & (err > 0)
    if np.count_nonzero(ok) < 2 or np.unique(dx[ok]).size < 2:
        return math.nan
    return float(np.polyfit(np.log(dx[ok]), np.log(err[ok]), 1)[0])


@dataclass
class RunReport:
    records: list[dict] = field(default_factory=list)
    rates: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def mean_errors(self, kernel: str, nsr: float, regularizer: str) -> tuple[np.ndarray, np.ndarray]:
        """Ladder dx values (descending) and the replicate-mean error at each."""
        sel = [r for r in self.records if r["kernel"] == kernel and r["nsr"] == nsr
               and r["regularizer"] == regularizer]
        dxs = sorted({r["dx"] for r in sel}, reverse=True)
        means = [np.mean([r["error"] for r in sel if r["dx"] == d]) for d in dxs]
        return np.array(dxs), np.array(means)

    def groups(self) -> list[tuple[str, float, str]]:
        return sorted({(r["kernel"], r["nsr"], r["regularizer"]) for r in self.records})

    def compute_rates(self) -> None:
        self.rates = []
        for kernel, nsr, reg in self.groups():
            dxs, means = self.mean_errors(kernel, nsr, reg)
            sel = [r for r in self.records if r["kernel"] == kernel and r["nsr"] == nsr
                   and r["regularizer"] == reg]
            per_rep = []
            for rep in sorted({r["replicate"] for r in sel}):
                rr = sorted((r for r in sel if r["replicate"] == rep), key=lambda r: r["dx"])
                s = loglog_slope([r["dx"] for r in rr], [r["error"] for r in rr])
                if math.isfinite(s):
                    per_rep.append(s)
            self.rates.append({
                "kernel": kernel, "nsr": nsr, "regularizer": reg,
                "rate": loglog_slope(dxs, means),
                "rate_mean": float(np.mean(per_rep)) if per_rep else math.nan,
                "rate_std": float(np.std(per_rep)) if per_rep else math.nan,
                "cells": len(sel),
            })

    def write_csv(self, outdir) -> tuple[Path, Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        report, rates = outdir / "report.csv", outdir / "rates.csv"
        _write_rows(report, REPORT_COLUMNS, self.records)
        _write_rows(rates, RATE_COLUMNS, self.rates)
        return report, rates

    @classmethod
    def read_csv(cls, outdir) -> "RunReport":
        outdir = Path(outdir)
        records = []
        with open(outdir / "report.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                records.append({
                    "kernel": row["kernel"], "dx": float(row["dx"]), "nsr": float(row["nsr"]),
                    "regularizer": row["regularizer"], "replicate": int(row["replicate"]),
                    "status": row["status"], "n": int(row["n"]), "lambda": float(row["lambda"]),
                    "loss": float(row["loss"]), "error": float(row["error"]),
                })
        rep = cls(records)
        rep.compute_rates()
        return rep


def _write_rows(path: Path, columns, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(columns)
            for row in rows:
                out.writerow([_fmt(row[c]) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _record_order(r: dict):
    return (r["kernel"], -r["dx"], r["nsr"], r["regularizer"], r["replicate"])


def run_convergence_sweep(cfg: ExperimentConfig, resume: bool = True) -> RunReport:
    """Run every cell of the config, reusing cached cells, and write report.csv and rates.csv."""
    outdir = Path(cfg.output_dir)
    cache = outdir / "cells"
    cache.mkdir(parents=True, exist_ok=True)
    todo, results = [], {}
    for cell in cells(cfg):
        path = cache / f"{cell.digest(cfg)}.json"
        if resume and path.exists():
            results[cell.digest(cfg)] = json.loads(path.read_text())["rows"]
        else:
            todo.append(cell)
    jobs = [(cfg, c) for c in todo]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outputs = pool.map(_run_cell_job, jobs)
            for cell, rows in zip(todo, outputs):
                _store(cache, cfg, cell, rows)
                results[cell.digest(cfg)] = rows
    else:
        for job in jobs:
            rows = _run_cell_job(job)
            _store(cache, cfg, job[1], rows)
            results[job[1].digest(cfg)] = rows
    records = sorted((r for rows in results.values() for r in rows), key=_record_order)
    report = RunReport(records)
    report.compute_rates()
    report.write_csv(outdir)
    return report


def _store(cache: Path, cfg: ExperimentConfig, cell: Cell, rows: list[dict]) -> None:
    path = cache / f"{cell.digest(cfg)}.json"
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps({"key": cell.key(cfg), "rows": rows}, sort_keys=True))
    tmp.replace(path)


def run_npairs_study(spec: TrueKernelSpec, n_values=(2, 4, 6, 8), dx: float = 0.05,
                     nsr: float = 1.0, replicates: int = 1, seed: int = 0,
                     regularizer="rkhs", degree: int = 2, domain=DOMAIN) -> list[dict]:
    """Mean error against the number of pairs {sin(ix), cos(ix)}_{i <= N/2}."""
    out = []
    for N in n_values:
        cfg = ExperimentConfig(spec, (dx,), (nsr,), replicates, degree, (regularizer,), seed,
                               domain=domain, n_pairs=N)
        errs = [row["error"] for c in cells(cfg) for row in run_cell(cfg, c)]
        out.append({"n_pairs": N, "mean_error": float(np.mean(errs)),
                    "std_error": float(np.std(errs))})
    return out
