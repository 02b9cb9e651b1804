"""Choosing the Tikhonov parameter at the corner of the L-curve."""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .assembly import Triplet
from .errors import DegenerateCurveWarning, NoPositiveSpectrum
from .solve import RTOL, GenEig, RegularizerKind, SpectralSolver

LOG_FLOOR = 1e-300
GRID_SIZE = 60


@dataclass(frozen=True)
class LCurve:
    lambdas: np.ndarray
    x: np.ndarray  # log E(c_lambda)
    y: np.ndarray  # log R(c_lambda)
    curvature: np.ndarray  # zero at both end points

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["lambda", "logE", "logR", "curvature"])
            for row in zip(self.lambdas, self.x, self.y, self.curvature):
                out.writerow([repr(float(v)) for v in row])


def _spectral_range(values: np.ndarray, rtol: float) -> tuple[float, float]:
    pos = values[values > 0]
    if pos.size == 0:
        raise NoPositiveSpectrum("no positive eigenvalue")
    hi = float(pos.max())
    return max(float(pos.min()), rtol * hi), hi


def lambda_range(e: GenEig, rtol: float = RTOL) -> tuple[float, float]:
    """[lambda_min, lambda_max] from the extreme positive generalized eigenvalues.

    lambda_min is floored at ``rtol * lambda_max`` so the search never goes
    below the numerical rank.
    """
    vals = e.raw if e.raw is not None else e.eigenvalues
    return _spectral_range(np.asarray(vals), rtol)


def penalty_range(solver: SpectralSolver, rtol: float = RTOL) -> tuple[float, float]:
    """Range of the pencil (A, Breg) for the solver's regulariser.

    For the RKHS norm the pencil (A, B_rkhs) has eigenvalues lambda_k^2, so
    its range is the square of :func:`lambda_range`; for L2(rho) the two
    coincide; for l2 it is the spectrum of A itself.
    """
    lo, hi = _spectral_range(solver.values, rtol)
    if solver.kind is RegularizerKind.RKHS:
        return lo * lo, hi * hi
    return lo, hi


def curvature_three_point(p_prev, p, p_next) -> float:
    """Signed reciprocal circumradius of three consecutive curve points.

    Positive when the path turns counter-clockwise, which is the orientation
    of the L-curve corner when traversed with increasing lambda. Collinear or
    coincident points give 0.
    """
    ax, ay = p[0] - p_prev[0], p[1] - p_prev[1]
    bx, by = p_next[0] - p[0], p_next[1] - p[1]
    cx, cy = p_next[0] - p_prev[0], p_next[1] - p_prev[1]
    cross = ax * by - ay * bx
    den = math.hypot(ax, ay) * math.hypot(bx, by) * math.hypot(cx, cy)
    if den == 0 or cross == 0:
        return 0.0
    return 2.0 * cross / den


def curve_curvature(x: np.ndarray, y: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Three-point curvature at interior points; sub-resolution triples count as flat."""
    n = len(x)
    kappa = np.zeros(n)
    scale = math.hypot(np.ptp(x), np.ptp(y)) if n else 0.0
    if scale == 0:
        return kappa
    tiny = rel_tol * scale
    for i in range(1, n - 1):
        a = math.hypot(x[i] - x[i - 1], y[i] - y[i - 1])
        b = math.hypot(x[i + 1] - x[i], y[i + 1] - y[i])
        if a < tiny or b < tiny:
            continue
        kappa[i] = curvature_three_point((x[i - 1], y[i - 1]), (x[i], y[i]),
                                         (x[i + 1], y[i + 1]))
    return kappa


def lcurve(solver: SpectralSolver, lambdas) -> LCurve:
    lambdas = np.asarray(lambdas, dtype=float)
    E = np.array([solver.loss(l) for l in lambdas])
    R = np.array([solver.penalty(l) for l in lambdas])
    x = np.log(np.maximum(E, LOG_FLOOR))
    y = np.log(np.maximum(R, LOG_FLOOR))
    return LCurve(lambdas, x, y, curve_curvature(x, y))


def select_lambda(t: Triplet, kind, e: GenEig | None = None, grid_size: int = GRID_SIZE,
                  lam_range: tuple[float, float] | None = None, rtol: float = RTOL,
                  solver: SpectralSolver | None = None) -> tuple[float, LCurve]:
    """Maximise the signed L-curve curvature over a log-spaced lambda grid.

    The grid spans ``lam_range`` (default: the spectral range of the pencil
    (A, Breg), see :func:`penalty_range`) inclusive of both ends. Only
    interior points are candidates; ties go to the larger lambda. If every
    curvature vanishes a DegenerateCurveWarning is issued and lambda_min is
    returned.
    """
    if grid_size < 5:
        raise ValueError("grid_size must be at least 5")
    if solver is None:
        solver = SpectralSolver(t, kind, e, rtol)
    lo, hi = lam_range if lam_range is not None else penalty_range(solver, rtol)
    lambdas = np.geomspace(lo, hi, grid_size)
    curve = lcurve(solver, lambdas)
    kappa = curve.curvature
    if not np.any(kappa[1:-1] != 0):
        warnings.warn("L-curve has no curvature; returning lambda_min",
                      DegenerateCurveWarning, stacklevel=2)
        return float(lo), curve
    inner = kappa[1:-1]
    best = np.flatnonzero(inner == inner.max())[-1] + 1
    return float(lambdas[best]), curve
