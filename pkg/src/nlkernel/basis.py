"""B-spline hypothesis spaces on [0, R] and their Gram matrices in L2(rho)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRange
from .explore import ExplorationMeasure


@dataclass(frozen=True)
class BSplineBasis:
    knots: np.ndarray
    degree: int

    def __post_init__(self):
        t = np.array(self.knots, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) < 0):
            raise ValueError("knots must be a nondecreasing 1-D sequence")
        if self.degree < 0:
            raise ValueError("degree must be nonnegative")
        if len(t) < self.degree + 2:
            raise ValueError("need at least degree + 2 knots")
        t.setflags(write=False)
        object.__setattr__(self, "knots", t)

    @property
    def dimension(self) -> int:
        return len(self.knots) - 1 - self.degree

    def design_matrix(self, r) -> np.ndarray:
        """Values N_{i,p}(r) for all basis functions, shape (len(r), dimension).

        Cox-de Boor recurrence with 0/0 := 0; the right end knot belongs to the
        last nonempty knot span.
        """
        t = self.knots
        r = np.atleast_1d(np.asarray(r, dtype=float))
        m = len(t) - 1
        N = ((t[:-1] <= r[:, None]) & (r[:, None] < t[1:])).astype(float)
        last = np.flatnonzero(t[:-1] < t[1:])
        if last.size:
            s = last[-1]
            N[r == t[-1], s] = 1.0
        for p in range(1, self.degree + 1):
            nxt = np.zeros((len(r), m - p))
            for i in range(m - p):
                d1 = t[i + p] - t[i]
                d2 = t[i + p + 1] - t[i + 1]
                if d1 > 0:
                    nxt[:, i] += (r - t[i]) / d1 * N[:, i]
                if d2 > 0:
                    nxt[:, i] += (t[i + p + 1] - r) / d2 * N[:, i + 1]
            N = nxt
        return N

    def evaluate(self, coefficients, r) -> np.ndarray:
        return self.design_matrix(r) @ np.asarray(coefficients, dtype=float)


def eval_basis(b: BSplineBasis, i: int, r) -> np.ndarray | float:
    if not 0 <= i < b.dimension:
        raise IndexError(f"basis index {i} outside [0, {b.dimension})")
    out = b.design_matrix(r)[:, i]
    return float(out[0]) if np.ndim(r) == 0 else out


@dataclass(frozen=True)
class HypothesisSpace:
    basis: BSplineBasis
    label: str = ""

    @property
    def dimension(self) -> int:
        return self.basis.dimension


def spline_knots(R: float, n: int, degree: int) -> np.ndarray:
    """Evenly spaced knots on [0, R] plus one repeated knot at 0, giving ``n`` functions.

    Degree 0 gets no extra knot (it would only add an identically zero function).
    """
    extra = 1 if degree >= 1 else 0
    intervals = n + degree - extra
    if intervals < 1:
        raise InvalidRange(f"dimension {n} too small for degree {degree}")
    t = np.linspace(0.0, R, intervals + 1)
    return np.concatenate([np.zeros(extra), t])


def make_space(R: float, n: int, degree: int = 2) -> HypothesisSpace:
    return HypothesisSpace(BSplineBasis(spline_knots(R, n, degree), degree),
                           f"bspline(p={degree}, n={n})")


def dimension_ladder(R: float, dx: float, degree: int = 2, count: int = 8,
                     fraction: tuple[float, float] = (0.2, 1.0)) -> list[int]:
    """Candidate dimensions spread linearly over floor(R/dx) * [0.2, 1]."""
    K = int(math.floor(R / dx * (1 + 1e-12)))
    lo = max(int(math.ceil(fraction[0] * K)), degree + 1)
    hi = int(math.floor(fraction[1] * K))
    if hi < lo:
        raise InvalidRange(
            f"floor(R/dx) = {K} leaves no dimension >= degree + 1 = {degree + 1}")
    return sorted({int(round(v)) for v in np.linspace(lo, hi, count)})


def make_hypothesis_spaces(R: float, dx: float, degree: int = 2,
                           count: int = 8) -> list[HypothesisSpace]:
    if not (R > 0 and dx > 0):
        raise InvalidRange("R and dx must be positive")
    if degree not in (0, 1, 2, 3):
        raise InvalidRange(f"degree must be 0..3, got {degree}")
    return [make_space(R, n, degree) for n in dimension_ladder(R, dx, degree, count)]


def basis_gram(h: HypothesisSpace, rho: ExplorationMeasure) -> np.ndarray:
    """B_n(i, j) = sum_k phi_i(r_k) phi_j(r_k) rho_k with normalised bin masses."""
    Phi = h.basis.design_matrix(rho.r)
    B = Phi.T @ (Phi * rho.weights[:, None])
    return 0.5 * (B + B.T)
