"""The nonlocal diffusion operator L_phi[u](x) = int phi(|y-x|) (u(y) - u(x)) dy.

Two evaluation routes are provided: a Riemann sum on the data grid (the rule
the learning stage is consistent with) and adaptive Gauss-Kronrod quadrature
for generating accurate ground-truth data.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import InvalidSpec, QuadratureNoConvergence
from .grid import SampledFunction

EXTENSIONS = ("zero", "none")


@dataclass(frozen=True)
class RadialKernel:
    """A radial kernel phi(r) supported on [0, support_radius].

    ``breakpoints`` lists radii where phi is discontinuous or kinked; the
    quadrature route splits panels there.
    """
    evaluate: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    breakpoints: tuple[float, ...] = ()
    name: str = ""

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.asarray(self.evaluate(np.abs(r)), dtype=float)
        return np.where(np.abs(r) <= self.support_radius, val, 0.0)

    def __add__(self, other: "RadialKernel") -> "RadialKernel":
        return RadialKernel(lambda r: self(r) + other(r),
                            max(self.support_radius, other.support_radius),
                            tuple(sorted(set(self.breakpoints) | set(other.breakpoints))))

    def scaled(self, c: float) -> "RadialKernel":
        return RadialKernel(lambda r: c * self(r), self.support_radius,
                            self.breakpoints, self.name)


def bin_count(radius: float, dx: float) -> int:
    """Number of bins r_k = k*dx, k >= 1, with r_k <= radius."""
    return int(math.floor(radius / dx * (1 + 1e-12)))


def shifted_differences(U: np.ndarray, K: int, extension: str = "zero") -> np.ndarray:
    """Second differences D[i, j, k-1] = u_i(x_j + r_k) + u_i(x_j - r_k) - 2 u_i(x_j).

    ``U`` is (N, J) or (J,). With ``extension="zero"`` samples outside the
    grid count as 0; with ``"none"`` a neighbour that falls off the grid
    contributes nothing (neither its value nor the ``-u(x_j)`` term).
    Returns an array of shape (N, J, K) (or (J, K) for 1-D input).
    """
    if extension not in EXTENSIONS:
        raise ValueError(f"extension must be one of {EXTENSIONS}")
    U = np.asarray(U, dtype=float)
    squeeze = U.ndim == 1
    U = np.atleast_2d(U)
    N, J = U.shape
    D = np.zeros((N, J, K))
    for k in range(1, K + 1):
        col = D[:, :, k - 1]
        if k < J:
            col[:, :J - k] += U[:, k:]
            col[:, k:] += U[:, :J - k]
        if extension == "zero":
            col -= 2 * U
        else:
            inside = np.zeros(J)
            inside[:max(J - k, 0)] += 1
            inside[min(k, J):] += 1
            col -= inside * U
    return D[0] if squeeze else D


def apply_riemann(phi: RadialKernel, u: SampledFunction,
                  extension: str = "zero") -> SampledFunction:
    """Riemann-sum evaluation of L_phi[u] at every grid node.

    g(x_j) = sum_k phi(r_k) [u(x_j + r_k) + u(x_j - r_k) - 2 u(x_j)] dx over
    bins r_k = k dx <= support_radius. The boundary rule is chosen by
    ``extension`` (see :func:`shifted_differences`).
    """
    dx = u.grid.dx
    K = bin_count(phi.support_radius, dx)
    if K == 0:
        return SampledFunction(u.grid, np.zeros(u.grid.count))
    r = dx * np.arange(1, K + 1)
    D = shifted_differences(u.values, K, extension)
    return SampledFunction(u.grid, D @ phi(r) * dx)


def apply_quadrature(phi: RadialKernel, u: Callable[[float], float], x: float,
                     tol: float = 1e-10, breakpoints=(), limit: int = 200) -> float:
    """Adaptive Gauss-Kronrod value of L_phi[u](x).

    The integral over [x - R0, x + R0] is folded onto r in [0, R0] and split
    at the kernel's breakpoints and at the radii |b - x| of the caller's
    breakpoints of ``u``. Raises QuadratureNoConvergence if a panel does not
    reach ``tol`` within ``limit`` subdivisions.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    R0 = phi.support_radius
    ux = u(x)
    cuts = {b for b in phi.breakpoints}
    cuts.update(abs(b - x) for b in breakpoints)
    cuts = sorted(c for c in cuts if 0 < c < R0)
    edges = [0.0, *cuts, R0]

    def integrand(r):
        return phi(r) * (u(x + r) + u(x - r) - 2 * ux)

    total = 0.0
    budget = tol / (len(edges) - 1)
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            out = integrate.quad(integrand, a, b, epsabs=budget, epsrel=0.0,
                                 limit=limit, full_output=1)
        val, err = out[0], out[1]
        if len(out) > 3 and err > budget:
            raise QuadratureNoConvergence(
                f"panel [{a}, {b}] at x={x}: error estimate {err:.3g} > {budget:.3g}")
        total += val
    return total


@dataclass(frozen=True)
class TrueKernelSpec:
    kind: str
    parameters: dict = field(default_factory=dict)

    KINDS = ("sine", "gaussian", "fractional")

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in self.KINDS:
            raise InvalidSpec(f"unknown kernel kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "parameters", dict(self.parameters))

    def to_json(self) -> dict:
        return {"kind": self.kind, "parameters": dict(self.parameters)}

    @classmethod
    def from_json(cls, obj) -> "TrueKernelSpec":
        if isinstance(obj, str):
            return cls(obj)
        return cls(obj["kind"], obj.get("parameters", {}))


def fractional_constant(d: int, s: float) -> float:
    """c_{d,s} = 4^s pi^{-d/2} Gamma(d/2 + s) Gamma(-s); negative for s in (0, 1)."""
    return 4 ** s * math.pi ** (-d / 2) * special.gamma(d / 2 + s) * special.gamma(-s)


def make_true_kernel(spec: TrueKernelSpec) -> RadialKernel:
    """Closed-form ground-truth kernels of the synthetic benchmarks."""
    p = spec.parameters
    if spec.kind == "sine":
        freq, cut = p.get("frequency", 6.0), p.get("cutoff", 10.0)
        return RadialKernel(lambda r: np.sin(freq * r), cut, (cut,), "sine")
    if spec.kind == "gaussian":
        mu, sd = p.get("center", 5.0), p.get("std", 1.0)
        R0 = p.get("support", mu + 8 * sd)
        return RadialKernel(
            lambda r: np.exp(-0.5 * ((r - mu) / sd) ** 2) / (sd * math.sqrt(2 * math.pi)),
            R0, (), "gaussian")
    s, d = p.get("s", 0.5), p.get("d", 1)
    if not 0 < s < 1:
        raise InvalidSpec(f"fractional exponent s must lie in (0, 1), got {s}")
    if d != 1:
        raise InvalidSpec("only d = 1 is supported")
    inner, outer = p.get("inner", 0.1), p.get("outer", 6.0)
    c = abs(fractional_constant(d, s))
    plateau = 10.0 ** (d + 2 * s)

    def frac(r):
        return np.where(r < inner, plateau, c * r ** (-(d + 2 * s)))

    return RadialKernel(frac, outer, (inner, outer), "fractional")
