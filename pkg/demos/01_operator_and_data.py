"""
Nonlocal operators and synthetic data
=====================================

A radial kernel phi acts on a sampled function u through

    L_phi[u](x_j) = sum_k phi(r_k) (u(x_j + r_k) + u(x_j - r_k) - 2 u(x_j)) dx,

with u taken as zero off the grid. Training pairs (u, f = L_phi[u]) are
produced by adaptive quadrature so that the learner never sees its own
discretisation.
"""
import numpy as np

from nlkernel.grid import UniformGrid
from nlkernel.operator import TrueKernelSpec, apply_quadrature, apply_riemann, make_true_kernel
from nlkernel.synthetic import synthetic_dataset

# The three synthetic kernels and their support radii
for kind in ("sine", "gaussian", "fractional"):
    phi = make_true_kernel(TrueKernelSpec(kind))
    r = np.array([0.5, 1.0, 2.0])
    print(f"{kind:>10}: support {phi.support_radius:g}, phi(0.5, 1, 2) = {np.round(phi(r), 4)}")

# Riemann sum against quadrature: for smooth u and phi the gap closes fast
phi = make_true_kernel(TrueKernelSpec("gaussian"))
u = lambda y: np.exp(-np.asarray(y) ** 2)
x = 0.7
exact = apply_quadrature(phi, u, x)
for dx in (0.2, 0.1, 0.05):
    g = UniformGrid.over(-20, 20, dx)
    j = int(np.argmin(np.abs(g.nodes - x)))
    approx = apply_riemann(phi, g.sample(u)).values[j]
    print(f"dx={dx:<5} Riemann {approx:+.6f}  quadrature {exact:+.6f}")

# A training set: truncated sin(x) and cos(x) on [-40, 40]
d = synthetic_dataset(TrueKernelSpec("sine"), 0.1)
print(f"{len(d)} pairs on {d.grid.count} nodes, max |f| = {np.abs(d.F).max():.3f}")
