"""
A resumable convergence sweep
=============================

Each (kernel, dx, nsr, replicate) cell is cached under a hash of its key,
so a rerun only computes what is missing and the CSV report is a pure
function of the config and seed.
"""
import time

from nlkernel.experiments import ExperimentConfig, run_convergence_sweep
from nlkernel.operator import TrueKernelSpec
from nlkernel.plots import emit_plots

cfg = ExperimentConfig(kernels=(TrueKernelSpec("gaussian"),), dx_ladder=(0.2, 0.1, 0.05),
                       nsr_ladder=(0.0,), replicates=1, output_dir="demo_output/sweep")

t = time.perf_counter()
report = run_convergence_sweep(cfg)
print(f"first run {time.perf_counter() - t:.1f} s")
t = time.perf_counter()
run_convergence_sweep(cfg)
print(f"cached rerun {time.perf_counter() - t:.2f} s")

for reg in ("l2", "L2", "rkhs"):
    dxs, means = report.mean_errors("gaussian", 0.0, reg)
    print(f"{reg:>4}: " + "  ".join(f"dx={d:g}: {m:.4f}" for d, m in zip(dxs, means)))
for row in report.rates:
    print(f"log-log slope {row['regularizer']:>4}: {row['rate']:.2f}")
print(emit_plots(report, "demo_output/sweep/figures"))
