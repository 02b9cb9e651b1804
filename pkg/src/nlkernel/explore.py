"""Exploration measure on pairwise distances and the data-driven support radius."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, DegenerateSupport, EmptySupport
from .grid import Dataset, support_bounds
from .operator import bin_count

SUPPORT_FACTOR = 1.1


@dataclass(frozen=True)
class ExplorationMeasure:
    """Probability weights on the bins r_k = k*dr, k = 1..len(weights)."""
    dr: float
    weights: np.ndarray
    truncated_to: float

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def r(self) -> np.ndarray:
        return self.dr * np.arange(1, len(self.weights) + 1)

    def __len__(self) -> int:
        return len(self.weights)

    def support_max(self, threshold: float = 1e-8) -> float:
        """Largest bin radius carrying weight above ``threshold``."""
        idx = np.flatnonzero(self.weights > threshold)
        if idx.size == 0:
            raise EmptySupport("exploration measure has no mass above threshold")
        return float(self.r[idx[-1]])

    def truncate(self, R: float) -> "ExplorationMeasure":
        """Restrict to bins r_k <= R and renormalise to unit mass."""
        K = min(bin_count(R, self.dr), len(self.weights))
        w = np.array(self.weights[:K])
        total = math.fsum(w)
        if total <= 0:
            raise DegenerateData(f"no exploration mass inside [0, {R}]")
        return ExplorationMeasure(self.dr, w / total, R)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["r", "weight"])
            for r, w in zip(self.r, self.weights):
                out.writerow([repr(float(r)), repr(float(w))])


def exploration_measure(d: Dataset, R0cap: float | None = None) -> ExplorationMeasure:
    """Empirical measure of pairwise distances weighted by |u_i(x_j) - u_i(x_k)|.

    Every ordered pair of grid nodes at distance r_k = k*dx <= R0cap adds
    |u_i(x_j) - u_i(x_k)| to bin k; the result is normalised to unit mass.
    ``R0cap`` defaults to half the domain width.
    """
    if len(d) == 0:
        raise DegenerateData("empty dataset")
    grid = d.grid
    if R0cap is None:
        R0cap = 0.5 * (grid.x1 - grid.x0)
    if not R0cap > 0:
        raise ValueError("R0cap must be positive")
    U = d.U
    J = grid.count
    K = min(bin_count(R0cap, grid.dx), J - 1)
    mass = np.zeros(K)
    for k in range(1, K + 1):
        per_pair = np.abs(U[:, k:] - U[:, :J - k]).sum(axis=1)
        # exactly rounded sum: independent of the order of the data pairs
        mass[k - 1] = 2.0 * math.fsum(per_pair)
    total = math.fsum(mass)
    if total <= 0:
        raise DegenerateData("all u_i are constant; the data explore no distance")
    return ExplorationMeasure(grid.dx, mass / total, K * grid.dx)


@dataclass(frozen=True)
class SupportEstimate:
    R: float
    R_rho: float
    per_pair_ranges: tuple[float, ...]


def estimate_support(d: Dataset, rho: ExplorationMeasure, threshold: float = 1e-8,
                     skip_empty: bool = False) -> SupportEstimate:
    """R = 1.1 * min(R_rho, max_i max(|L^f_i - L^u_i|, |R^f_i - R^u_i|)).

    Supports of u_i, f_i and rho are thresholded at ``threshold``. With
    ``skip_empty`` pairs whose u or f vanish identically are ignored instead
    of raising EmptySupport.
    """
    R_rho = rho.support_max(threshold)
    ranges = []
    for p in d.pairs:
        try:
            Lu, Ru = support_bounds(p.u, threshold)
            Lf, Rf = support_bounds(p.f, threshold)
        except EmptySupport:
            if skip_empty:
                continue
            raise
        ranges.append(max(abs(Lf - Lu), abs(Rf - Ru)))
    if not ranges:
        raise EmptySupport("every data pair has empty support")
    R = SUPPORT_FACTOR * min(R_rho, max(ranges))
    if R <= 0:
        raise DegenerateSupport("u and f supports coincide; the data give no interaction range")
    return SupportEstimate(R, R_rho, tuple(ranges))
