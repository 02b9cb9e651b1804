"""Synthetic benchmark data: truncated trigonometric inputs and exact operator outputs."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .grid import Dataset, UniformGrid
from .operator import RadialKernel, TrueKernelSpec, apply_quadrature, make_true_kernel

DOMAIN = (-40.0, 40.0)
QUAD_TOL = 1e-10


def truncated_trig(kind: str, freq: float = 1.0, half_width: float = math.pi):
    """Scalar and vectorised versions of sin(freq x) or cos(freq x) on [-half_width, half_width]."""
    fn = math.sin if kind == "sin" else math.cos
    vfn = np.sin if kind == "sin" else np.cos

    def scalar(y: float) -> float:
        return fn(freq * y) if -half_width <= y <= half_width else 0.0

    def vector(y):
        y = np.asarray(y, dtype=float)
        return np.where(np.abs(y) <= half_width, vfn(freq * y), 0.0)

    return scalar, vector


def input_functions(n_pairs: int = 2):
    """u = sin(i x), cos(i x) truncated to [-pi, pi], for i = 1..n_pairs/2."""
    funcs = []
    for i in range(1, n_pairs // 2 + 1):
        funcs.append(truncated_trig("sin", i))
        funcs.append(truncated_trig("cos", i))
    if n_pairs % 2:
        funcs.append(truncated_trig("sin", n_pairs // 2 + 1))
    return funcs


def exact_outputs(phi: RadialKernel, grid: UniformGrid, funcs, half_width: float = math.pi,
                  tol: float = QUAD_TOL) -> np.ndarray:
    """f_i(x_j) = L_phi[u_i](x_j) by adaptive quadrature; zero where the window misses supp u."""
    x = grid.nodes
    F = np.zeros((len(funcs), grid.count))
    reach = half_width + phi.support_radius
    active = np.flatnonzero(np.abs(x) < reach)
    for i, (scalar, _) in enumerate(funcs):
        for j in active:
            F[i, j] = apply_quadrature(phi, scalar, float(x[j]), tol,
                                       breakpoints=(-half_width, half_width))
    return F


@lru_cache(maxsize=32)
def _cached(kind_json: str, x0: float, dx: float, count: int, n_pairs: int) -> tuple:
    import json
    spec = TrueKernelSpec.from_json(json.loads(kind_json))
    grid = UniformGrid(x0, dx, count)
    funcs = input_functions(n_pairs)
    U = np.stack([v(grid.nodes) for _, v in funcs])
    F = exact_outputs(make_true_kernel(spec), grid, funcs)
    return U, F


def synthetic_dataset(spec: TrueKernelSpec, dx: float, domain=DOMAIN,
                      n_pairs: int = 2) -> Dataset:
    """Noiseless data {u_i, L_phi[u_i]} on a uniform grid over ``domain``."""
    import json
    grid = UniformGrid.over(domain[0], domain[1], dx)
    U, F = _cached(json.dumps(spec.to_json(), sort_keys=True), grid.x0, grid.dx,
                   grid.count, n_pairs)
    return Dataset.from_arrays(grid, U, F)
