"""Command line drivers: generate, learn, sweep, wave-sim, wave-learn, plot.

Exit codes: 0 success, 2 configuration error, 3 degenerate data,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import errors
from .grid import Dataset, NoiseSpec, add_noise

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

_DATA_ERRORS = (errors.DegenerateData, errors.EmptySupport, errors.DegenerateSupport,
                errors.ZeroTruth, errors.LengthMismatch)
_NUMERIC_ERRORS = (errors.AllSpacesSingular, errors.FactorizationFailure,
                   errors.NoPositiveSpectrum, errors.QuadratureNoConvergence,
                   errors.StabilityViolation, errors.SingularBasis, np.linalg.LinAlgError)
_CONFIG_ERRORS = (errors.InvalidSpec, errors.InvalidRange, ValueError, KeyError,
                  FileNotFoundError, json.JSONDecodeError, IsADirectoryError)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file of defaults; flags override it")
    p.add_argument("--out", type=Path, help="output file or directory")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--regularizer", choices=["l2", "L2", "rkhs"], help="Tikhonov norm")
    p.add_argument("--degree", type=int, help="B-spline degree")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlkernel",
                                     description="Learn radial kernels of nonlocal operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthetic data pairs as Dataset JSON")
    _common(p)
    p.add_argument("--kernel", choices=["sine", "gaussian", "fractional"])
    p.add_argument("--dx", type=float)
    p.add_argument("--nsr", type=float)
    p.add_argument("--n-pairs", type=int)
    p.add_argument("--domain", type=float, nargs=2, metavar=("A", "B"))

    p = sub.add_parser("learn", help="run the learning algorithm on a Dataset JSON")
    _common(p)
    p.add_argument("--data", type=Path)
    p.add_argument("--support-radius", type=float)
    p.add_argument("--lam", type=float, help="fixed lambda instead of the L-curve")
    p.add_argument("--truth", choices=["sine", "gaussian", "fractional"],
                   help="report the error against this synthetic kernel")

    p = sub.add_parser("sweep", help="convergence sweep over dx and nsr")
    _common(p)
    p.add_argument("--kernel", choices=["sine", "gaussian", "fractional"], action="append")
    p.add_argument("--dx", type=float, nargs="+")
    p.add_argument("--nsr", type=float, nargs="+")
    p.add_argument("--replicates", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--domain", type=float, nargs=2, metavar=("A", "B"))

    p = sub.add_parser("wave-sim", help="simulate one loading of the nonlocal wave model")
    _common(p)
    p.add_argument("--estimate", type=Path, help="kernel JSON; default is the Gaussian bump")
    p.add_argument("--loading", choices=["type1", "type2", "type3", "type4"])
    p.add_argument("--index", type=int)
    p.add_argument("--b", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--dx", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--every", type=int, help="write every n-th snapshot")

    p = sub.add_parser("wave-learn", help="learn a kernel from simulated wave snapshots")
    _common(p)
    p.add_argument("--data", type=Path, help="Dataset JSON of (u^n, f^n) pairs")
    p.add_argument("--b", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--dx", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--r0cap", type=float, help="largest distance scanned by rho")

    p = sub.add_parser("plot", help="figures for a sweep directory")
    _common(p)
    p.add_argument("--report", type=Path, help="directory holding report.csv")
    return parser


_DEFAULTS = {
    "generate": {"kernel": "gaussian", "dx": 0.05, "nsr": 0.0, "n_pairs": 2,
                 "domain": [-40.0, 40.0], "seed": 0, "out": "data.json"},
    "learn": {"regularizer": "rkhs", "degree": 2, "out": "learned"},
    "sweep": {"out": "sweep"},
    "wave-sim": {"loading": "type2", "index": 1, "b": 25.0, "T": 2.0, "dx": 0.05,
                 "dt": 0.02, "every": 1, "out": "trajectory.csv"},
    "wave-learn": {"regularizer": "rkhs", "degree": 2, "b": 25.0, "T": 2.0, "dx": 0.05,
                   "dt": 0.02, "r0cap": 5.0, "out": "wave"},
    "plot": {"out": "figures"},
}


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then the JSON config, then explicit flags."""
    opts = dict(_DEFAULTS[args.command])
    if args.config is not None:
        cfg = json.loads(Path(args.config).read_text())
        if not isinstance(cfg, dict):
            raise errors.InvalidSpec("config file must hold a JSON object")
        opts.update(cfg)
    for k, v in vars(args).items():
        if k in ("command", "config", "verbose") or v is None:
            continue
        opts[k] = v
    return opts


def cmd_generate(o: dict) -> int:
    from .operator import TrueKernelSpec
    from .synthetic import synthetic_dataset
    spec = TrueKernelSpec.from_json(o["kernel"])
    d = synthetic_dataset(spec, float(o["dx"]), tuple(o["domain"]), int(o["n_pairs"]))
    d = add_noise(d, NoiseSpec(float(o["nsr"]), int(o["seed"])))
    d.save(o["out"])
    print(f"wrote {len(d)} pairs on {d.grid.count} nodes to {o['out']}")
    return EXIT_OK


def _learn_and_report(d: Dataset, o: dict, outdir: Path, truth=None, **kw) -> dict:
    from .pipeline import fit, prepare
    from .plots import estimate_overlay, lcurve_plot
    from .solve import relative_l2rho_error
    prep = prepare(d, o.get("support_radius"), kw.get("R0cap"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = fit(prep, o["regularizer"], int(o["degree"]), lam=o.get("lam"))
    outdir.mkdir(parents=True, exist_ok=True)
    est.save(outdir / "estimate.json")
    prep.rho.write_csv(outdir / "rho.csv")
    curve = est.diagnostics.get("lcurve")
    if curve is not None:
        curve.write_csv(outdir / "lcurve.csv")
        lcurve_plot(curve, est.lam, outdir / "lcurve")
    estimate_overlay(est, truth, prep.rho, outdir / "estimate")
    summary = {"R": prep.R, "n": est.diagnostics["n"], "lambda": est.lam, "loss": est.loss,
               "regularizer": est.regularizer.value}
    if truth is not None:
        summary["error"] = relative_l2rho_error(est, truth, prep.rho)
    summary["_estimate"] = est
    summary["_prep"] = prep
    return summary


def _print_summary(summary: dict) -> None:
    shown = {k: v for k, v in summary.items() if not k.startswith("_")}
    print(json.dumps(shown, indent=2, sort_keys=True))


def cmd_learn(o: dict) -> int:
    from .operator import TrueKernelSpec, make_true_kernel
    if "data" not in o:
        raise errors.InvalidSpec("learn needs --data")
    d = Dataset.load(o["data"])
    truth = make_true_kernel(TrueKernelSpec.from_json(o["truth"])) if o.get("truth") else None
    summary = _learn_and_report(d, o, Path(o["out"]), truth)
    _print_summary(summary)
    return EXIT_OK


def cmd_sweep(o: dict) -> int:
    from .experiments import ExperimentConfig, run_convergence_sweep
    from .plots import emit_plots
    cfg_obj = {k: v for k, v in o.items() if k in ExperimentConfig.__dataclass_fields__}
    flag_map = {"kernel": "kernels", "dx": "dx_ladder", "nsr": "nsr_ladder"}
    for flag, key in flag_map.items():
        if flag in o:
            v = o[flag]
            cfg_obj[key] = [v] if isinstance(v, (str, int, float, dict)) else v
    if "regularizer" in o:
        cfg_obj["regularizers"] = [o["regularizer"]]
    cfg_obj["output_dir"] = str(o["out"])
    cfg = ExperimentConfig.from_json(cfg_obj)
    report = run_convergence_sweep(cfg)
    emit_plots(report, Path(cfg.output_dir) / "figures")
    for row in report.rates:
        print(f"{row['kernel']:>12} nsr={row['nsr']:<4g} {row['regularizer']:>4} "
              f"rate={row['rate']:.3f}")
    return EXIT_OK


def _kernel_from_file(path):
    from .solve import KernelEstimate
    return KernelEstimate.load(path)


def cmd_wave_sim(o: dict) -> int:
    from .wave import LoadingSpec, gaussian_bump, simulate
    phi = _kernel_from_file(o["estimate"]) if o.get("estimate") else gaussian_bump()
    ld = LoadingSpec(o["loading"], int(o["index"]), float(o["b"]), float(o["T"]))
    traj = simulate(phi, ld, float(o["dx"]), float(o["dt"]))
    traj.write_csv(o["out"], int(o["every"]))
    print(f"wrote {len(range(0, len(traj.u), int(o['every'])))} snapshots of {traj.grid.count} nodes to {o['out']}")
    return EXIT_OK


def cmd_wave_learn(o: dict) -> int:
    from .plots import dispersion_plot
    from .wave import dispersion_curve, gaussian_bump, is_physically_stable, training_dataset, training_loadings
    truth = None
    if o.get("data"):
        d = Dataset.load(o["data"])
    else:
        truth = gaussian_bump()
        d = training_dataset(truth, training_loadings(float(o["b"]), float(o["T"])),
                             float(o["dx"]), float(o["dt"]))
    outdir = Path(o["out"])
    summary = _learn_and_report(d, o, outdir, truth, R0cap=float(o["r0cap"]))
    est = summary["_estimate"]
    ks = np.linspace(0.0, np.pi / d.grid.dx, 400)
    omega, vg = dispersion_curve(est, ks, d.grid.dx)
    dispersion_plot(ks, omega, vg, outdir / "dispersion")
    summary["physically_stable"] = is_physically_stable(est, ks, d.grid.dx)
    _print_summary(summary)
    return EXIT_OK


def cmd_plot(o: dict) -> int:
    from .experiments import RunReport
    from .plots import emit_plots
    if "report" not in o:
        raise errors.InvalidSpec("plot needs --report")
    report = RunReport.read_csv(o["report"])
    files = emit_plots(report, o["out"])
    print(f"wrote {len(files)} files to {o['out']}")
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "learn": cmd_learn, "sweep": cmd_sweep,
            "wave-sim": cmd_wave_sim, "wave-learn": cmd_wave_learn, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](resolve(args))
    except _DATA_ERRORS as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _NUMERIC_ERRORS as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _CONFIG_ERRORS as exc:
        print(f"error: configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
