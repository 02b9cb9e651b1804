"""Nonlocal wave dynamics u_tt = L_phi[u] + g on a bar [-b, b].

Time stepping is the explicit central-difference (leapfrog) scheme that is
also used to turn displacement snapshots into training pairs, so data
simulated here and data read back by the learner share one stencil.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, StabilityViolation
from .grid import DataPair, Dataset, SampledFunction, UniformGrid
from .operator import RadialKernel, apply_riemann, bin_count

PERIOD_L = 0.2
TRAIN_HALFWIDTH = 50.0
TRAIN_DURATION = 2.0
TRAIN_DT = 0.02
PACKET_HALFWIDTH = 133.3
PACKET_DURATION = 100.0
STABLE_TOL = -1e-10


def gaussian_bump(width: float = 1.0, cutoff: float = 3.0) -> RadialKernel:
    """Nonnegative reference kernel exp(-(r / width)^2) on [0, cutoff]."""
    return RadialKernel(lambda r: np.exp(-(r / width) ** 2), cutoff, (cutoff,), "gaussian-bump")


class LoadingKind(str, enum.Enum):
    OSCILLATING_SOURCE = "type1"
    PLANE_WAVE_COS = "type2"
    PLANE_WAVE_SIN = "type3"
    WAVE_PACKET = "type4"


@dataclass(frozen=True)
class LoadingSpec:
    """One loading scenario.

    For the oscillating source and the wave packet ``index_j`` is the integer
    j of the formulas; for the plane waves the loading frequency is
    ``0.35 * index_j``.
    """
    kind: LoadingKind
    index_j: int
    b: float = TRAIN_HALFWIDTH
    T: float = TRAIN_DURATION
    L: float = PERIOD_L

    def __post_init__(self):
        object.__setattr__(self, "kind", LoadingKind(self.kind))
        if self.b <= 0 or self.T <= 0:
            raise ValueError("domain half-width and duration must be positive")

    @property
    def frequency(self) -> float:
        if self.kind in (LoadingKind.PLANE_WAVE_COS, LoadingKind.PLANE_WAVE_SIN):
            return 0.35 * self.index_j
        return float(self.index_j)

    def source(self, x: np.ndarray, t: float) -> np.ndarray:
        """Body force g(x, t)."""
        x = np.asarray(x, dtype=float)
        if self.kind is not LoadingKind.OSCILLATING_SOURCE:
            return np.zeros_like(x)
        jL = self.index_j * self.L
        return (np.exp(-(2 * x / (5 * jL)) ** 2) * math.exp(-((t - 0.8) / 0.8) ** 2)
                * np.cos(2 * np.pi * x / jL) ** 2)

    def boundary_velocity(self, t: float) -> float | None:
        """Prescribed velocity at x = -b, or None when the left end is free."""
        w = self.frequency
        if self.kind is LoadingKind.PLANE_WAVE_COS:
            return math.cos(w * t)
        if self.kind is LoadingKind.PLANE_WAVE_SIN:
            return math.sin(w * t)
        if self.kind is LoadingKind.WAVE_PACKET:
            return math.sin(w * t) * math.exp(-(t / 5 - 3) ** 2)
        return None


def training_loadings(b: float = TRAIN_HALFWIDTH, T: float = TRAIN_DURATION,
                      L: float = PERIOD_L, kinds=("type1", "type2", "type3")) -> list[LoadingSpec]:
    """The training tables: 20 oscillating sources and 11 cos and 11 sin plane waves."""
    counts = {LoadingKind.OSCILLATING_SOURCE: 20, LoadingKind.PLANE_WAVE_COS: 11,
              LoadingKind.PLANE_WAVE_SIN: 11, LoadingKind.WAVE_PACKET: 3}
    out = []
    for kind in map(LoadingKind, kinds):
        out.extend(LoadingSpec(kind, j, b, T, L) for j in range(1, counts[kind] + 1))
    return out


def validation_loadings(b: float = PACKET_HALFWIDTH, T: float = PACKET_DURATION,
                        L: float = PERIOD_L) -> list[LoadingSpec]:
    return [LoadingSpec(LoadingKind.WAVE_PACKET, j, b, T, L) for j in (1, 2, 3)]


@dataclass(frozen=True)
class WaveState:
    grid: UniformGrid
    u_prev: np.ndarray
    u_curr: np.ndarray
    dt: float
    time: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        for name in ("u_prev", "u_curr"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (self.grid.count,):
                raise LengthMismatch(f"{name} has {v.size} values for {self.grid.count} nodes")
            object.__setattr__(self, name, v)

    @classmethod
    def at_rest(cls, grid: UniformGrid, dt: float) -> "WaveState":
        z = np.zeros(grid.count)
        return cls(grid, z, z, dt)

    def reversed(self) -> "WaveState":
        """Same state with time running backwards (swap the two time levels)."""
        return WaveState(self.grid, self.u_curr, self.u_prev, self.dt, self.time)


def positive_mass(phi, dx: float) -> float:
    """Riemann value of the integral of max(phi, 0) on the bins of the grid."""
    K = bin_count(phi.support_radius, dx)
    if K == 0:
        return 0.0
    return float(np.sum(np.maximum(phi(dx * np.arange(1, K + 1)), 0.0)) * dx)


def check_stability(phi, dx: float, dt: float) -> None:
    """Leapfrog bound dt^2 sup omega^2 < 4 with sup omega^2 <= 4 * int phi_+."""
    bound = dt * dt * 4.0 * positive_mass(phi, dx)
    if not bound < 4.0:
        raise StabilityViolation(
            f"dt^2 * 4 int phi_+ = {bound:.4g} >= 4; reduce dt below "
            f"{1.0 / math.sqrt(positive_mass(phi, dx)):.4g}")


def _advance(state: WaveState, phi, g_n, v_next: float | None):
    Lu = apply_riemann(phi, SampledFunction(state.grid, state.u_curr)).values
    u_next = 2 * state.u_curr - state.u_prev + state.dt ** 2 * (Lu + g_n)
    if v_next is not None:
        u_next[0] = state.u_curr[0] + state.dt * v_next
    return u_next, Lu


def step(state: WaveState, phi, g_n=None, v_bc: float | None = None,
         check: bool = True) -> WaveState:
    """One leapfrog step u^{n+1} = 2u^n - u^{n-1} + dt^2 (L_phi[u^n] + g^n).

    ``v_bc`` is the prescribed velocity at the left end at the new time; the
    left node is then overwritten by u^n(-b) + dt v_bc.
    """
    if check:
        check_stability(phi, state.grid.dx, state.dt)
    g_n = np.zeros(state.grid.count) if g_n is None else np.asarray(g_n, dtype=float)
    if g_n.shape != (state.grid.count,):
        raise LengthMismatch(f"forcing has {g_n.size} values for {state.grid.count} nodes")
    u_next, _ = _advance(state, phi, g_n, v_bc)
    return WaveState(state.grid, state.u_curr, u_next, state.dt, state.time + state.dt)


@dataclass(frozen=True)
class Trajectory:
    """Snapshots u^n and effective forcing g^n at t^n = n dt, n = 0..M.

    At a node overwritten by a velocity loading the recorded g^n is the
    forcing that reproduces the overwrite through the leapfrog stencil, so
    every interior time level satisfies the scheme exactly. The last level
    has no successor and its forcing is the applied one.
    """
    grid: UniformGrid
    dt: float
    u: np.ndarray  # (M + 1, J)
    g: np.ndarray  # (M + 1, J)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.u))

    def write_csv(self, path, every: int = 1) -> None:
        """One row per saved snapshot: t followed by the nodal values."""
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["t"] + [repr(float(x)) for x in self.grid.nodes])
            for n in range(0, len(self.u), every):
                out.writerow([repr(float(n * self.dt))] + [repr(float(v)) for v in self.u[n]])


def simulate(phi, loading: LoadingSpec, dx: float, dt: float = TRAIN_DT,
             check: bool = True) -> Trajectory:
    """Run one loading from rest on [-b, b] up to time T."""
    grid = UniformGrid.over(-loading.b, loading.b, dx)
    if check:
        check_stability(phi, dx, dt)
    M = int(round(loading.T / dt))
    x = grid.nodes
    U = np.zeros((M + 1, grid.count))
    G = np.zeros((M + 1, grid.count))
    state = WaveState.at_rest(grid, dt)
    for n in range(M):
        t = n * dt
        g_n = loading.source(x, t)
        v_next = loading.boundary_velocity(t + dt)
        u_next, Lu = _advance(state, phi, g_n, v_next)
        if v_next is not None:
            g_n = g_n.copy()
            g_n[0] = (u_next[0] - 2 * state.u_curr[0] + state.u_prev[0]) / dt ** 2 - Lu[0]
        G[n] = g_n
        U[n + 1] = u_next
        state = WaveState(grid, state.u_curr, u_next, dt, t + dt)
    G[M] = loading.source(x, M * dt)
    return Trajectory(grid, dt, U, G)


def build_training_pairs(trajectory, g, dt: float, grid: UniformGrid | None = None) -> Dataset:
    """Pairs (u^n, f^n) with f^n = (u^{n+1} - 2u^n + u^{n-1}) / dt^2 - g^n, n = 1..M-1.

    ``trajectory`` is a sequence of snapshots (or a :class:`Trajectory`, in
    which case ``g`` may be None); ``grid`` defaults to the trajectory's.
    """
    if isinstance(trajectory, Trajectory):
        grid = grid or trajectory.grid
        g = trajectory.g if g is None else g
        trajectory = trajectory.u
    U = np.asarray(trajectory, dtype=float)
    G = np.asarray(g, dtype=float)
    if U.ndim != 2 or len(U) < 3:
        raise LengthMismatch("need at least three snapshots")
    if G.shape != U.shape:
        raise LengthMismatch(f"{len(G)} forcing snapshots for {len(U)} displacement snapshots")
    if grid is None:
        raise ValueError("grid is required for raw snapshot arrays")
    F = (U[2:] - 2 * U[1:-1] + U[:-2]) / dt ** 2 - G[1:-1]
    return Dataset.from_arrays(grid, U[1:-1], F)


def merge_datasets(parts) -> Dataset:
    pairs: list[DataPair] = []
    for d in parts:
        pairs.extend(d.pairs)
    return Dataset(tuple(pairs))


def training_dataset(phi, loadings, dx: float, dt: float = TRAIN_DT) -> Dataset:
    """Simulate every loading and pool the snapshot pairs."""
    return merge_datasets(build_training_pairs(simulate(phi, ld, dx, dt), None, dt)
                          for ld in loadings)


def _kernel_bins(phi, dx: float | None) -> tuple[np.ndarray, float]:
    R = float(phi.support_radius)
    if dx is None:
        dx = R / 4000 if R > 0 else 1.0
    K = bin_count(R, dx)
    return dx * np.arange(1, K + 1), dx


def dispersion_omega2(phi, k, dx: float | None = None):
    """omega^2(k) = int 2 phi(r) (1 - cos k r) dr as a Riemann sum on r_m = m dx.

    ``dx`` defaults to support_radius / 4000. Vectorised over ``k``.
    """
    r, dx = _kernel_bins(phi, dx)
    w = np.asarray(phi(r), dtype=float)
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    val = 2.0 * dx * ((1.0 - np.cos(np.outer(k_arr, r))) @ w)
    return float(val[0]) if np.ndim(k) == 0 else val


def dispersion_curve(phi, ks, dx: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(omega, group velocity) on the wavenumbers ``ks``.

    omega = sqrt(max(omega^2, 0)); the group velocity d omega / dk uses
    centred differences (one-sided at the ends).
    """
    ks = np.asarray(ks, dtype=float)
    omega = np.sqrt(np.maximum(dispersion_omega2(phi, ks, dx), 0.0))
    return omega, np.gradient(omega, ks)


def is_physically_stable(phi, ks, dx: float | None = None, tol: float = STABLE_TOL) -> bool:
    return bool(np.min(dispersion_omega2(phi, np.asarray(ks, dtype=float), dx)) >= tol)


def relative_displacement_error(pred: Trajectory, ref: Trajectory) -> float:
    """Relative L2 error of the displacement at the final time."""
    den = np.linalg.norm(ref.u[-1])
    if den == 0:
        raise ZeroDivisionError("reference displacement vanishes at the final time")
    return float(np.linalg.norm(pred.u[-1] - ref.u[-1]) / den)
