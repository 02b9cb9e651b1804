"""Least squares with l2, L2(rho) and data-adaptive RKHS Tikhonov regularisers.

All three regularised problems (A + lam * Breg) c = b are solved through a
symmetric eigen-factorisation that is computed once per triplet:

* ``L2rho`` and ``rkhs`` use the generalized eigenpairs A V = B V Lambda with
  V'BV = I, in which A, B and B_rkhs are all diagonal;
* ``l2`` uses the ordinary eigenpairs of A.

Directions whose eigenvalue falls below ``rtol * max`` are treated as null
directions (the minimum-norm pseudo-inverse), so no component outside the
identifiable subspace is excited.
"""
from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .basis import HypothesisSpace
from .assembly import RegressionData, Triplet
from .errors import FactorizationFailure, IllConditionedWarning, ZeroTruth
from .explore import ExplorationMeasure

RTOL = 1e-12
COND_WARN = 1e14


class RegularizerKind(str, enum.Enum):
    L2SMALL = "l2"
    L2RHO = "L2"
    RKHS = "rkhs"

    @classmethod
    def parse(cls, value) -> "RegularizerKind":
        if isinstance(value, cls):
            return value
        aliases = {"l2": cls.L2SMALL, "L2": cls.L2RHO, "l2rho": cls.L2RHO,
                   "L2rho": cls.L2RHO, "rkhs": cls.RKHS, "RKHS": cls.RKHS,
                   "L2SMALL": cls.L2SMALL, "L2RHO": cls.L2RHO}
        try:
            return aliases[value]
        except KeyError:
            raise ValueError(f"unknown regularizer {value!r}; use l2, L2 or rkhs") from None


@dataclass(frozen=True)
class GenEig:
    """Generalized eigenpairs of (A, B): A V = B V diag(eigenvalues), V'BV = I."""
    eigenvalues: np.ndarray
    vectors: np.ndarray
    B: np.ndarray
    raw: np.ndarray = field(repr=False, default=None)

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0]) if len(self.eigenvalues) else 0.0

    def positive(self, rtol: float = RTOL) -> np.ndarray:
        lmax = self.lambda_max
        return self.eigenvalues > max(rtol * lmax, 0.0) if lmax > 0 else np.zeros(
            len(self.eigenvalues), dtype=bool)


def gen_eig(t: Triplet) -> GenEig:
    """Symmetric-definite reduction: B = LL', eigendecompose L^-1 A L^-T, map back."""
    try:
        L = linalg.cholesky(t.B, lower=True)
    except linalg.LinAlgError as exc:
        raise FactorizationFailure(f"basis matrix is not positive definite: {exc}") from exc
    C = linalg.solve_triangular(L, t.A, lower=True)
    C = linalg.solve_triangular(L, C.T, lower=True)
    C = 0.5 * (C + C.T)
    w, Y = linalg.eigh(C)
    order = np.argsort(w)[::-1]
    w, Y = w[order], Y[:, order]
    V = linalg.solve_triangular(L.T, Y, lower=False)
    return GenEig(np.clip(w, 0.0, None), V, t.B, w)


def rkhs_norm_matrix(e: GenEig, rtol: float = RTOL) -> np.ndarray:
    """B_rkhs = (V Lambda V')^+ = (BV) Lambda^+ (BV)', using V^-1 = V'B."""
    keep = e.positive(rtol)
    BV = e.B @ e.vectors
    inv = np.zeros_like(e.eigenvalues)
    inv[keep] = 1.0 / e.eigenvalues[keep]
    M = (BV * inv) @ BV.T
    return 0.5 * (M + M.T)


def fsoi_spectrum(e: GenEig, rtol: float = RTOL) -> tuple[int, np.ndarray]:
    """Numerical rank of the data operator and its (nonincreasing) spectrum."""
    return int(np.count_nonzero(e.positive(rtol))), e.eigenvalues.copy()


class SpectralSolver:
    """Regularised solutions c_lambda for one triplet and one regulariser."""

    def __init__(self, t: Triplet, kind, e: GenEig | None = None, rtol: float = RTOL):
        self.t = t
        self.kind = RegularizerKind.parse(kind)
        self.rtol = rtol
        if self.kind is RegularizerKind.L2SMALL:
            s, Q = linalg.eigh(t.A)
            s = np.clip(s[::-1], 0.0, None)
            self.values, self.vectors = s, Q[:, ::-1]
        else:
            if e is None:
                e = gen_eig(t)
            self.values, self.vectors = e.eigenvalues, e.vectors
        self.beta = self.vectors.T @ t.b
        vmax = self.values[0] if len(self.values) else 0.0
        self.keep = self.values > rtol * vmax if vmax > 0 else np.zeros(len(self.values), bool)

    def _filtered(self, lam: float) -> np.ndarray:
        s, beta, keep = self.values, self.beta, self.keep
        z = np.zeros_like(beta)
        if self.kind is RegularizerKind.RKHS:
            z[keep] = s[keep] * beta[keep] / (s[keep] ** 2 + lam)
        elif lam > 0:
            z = beta / (s + lam)
        else:
            z[keep] = beta[keep] / s[keep]
        return z

    def coefficients(self, lam: float) -> np.ndarray:
        if lam < 0:
            raise ValueError("lambda must be nonnegative")
        return self.vectors @ self._filtered(lam)

    def penalty(self, lam: float) -> float:
        """R(c_lambda) for this regulariser."""
        z = self._filtered(lam)
        if self.kind is RegularizerKind.L2SMALL:
            return float(z @ z)
        if self.kind is RegularizerKind.L2RHO:
            return float(z @ z)
        keep = self.keep
        return float(np.sum(z[keep] ** 2 / self.values[keep]))

    def loss(self, lam: float) -> float:
        """Data-fit E(c_lambda) = c'Ac - 2c'b + C_f, evaluated in eigen-coordinates."""
        z = self._filtered(lam)
        if self.kind is RegularizerKind.L2SMALL:
            return float(z @ (self.values * z) - 2 * z @ self.beta + self.t.Cf)
        return float(np.sum(self.values * z ** 2) - 2 * z @ self.beta + self.t.Cf)

    def condition(self, lam: float) -> float:
        """Condition number of A + lam Breg restricted to the solved directions."""
        s = self.values
        if self.kind is RegularizerKind.RKHS:
            d = s[self.keep] + lam / s[self.keep]
        elif lam > 0:
            d = s + lam
        else:
            d = s[self.keep]
        if d.size == 0 or d.min() <= 0:
            return np.inf
        return float(d.max() / d.min())


def solve_regularized(t: Triplet, kind, lam: float, e: GenEig | None = None,
                      rtol: float = RTOL) -> np.ndarray:
    """Minimiser of c'(A + lam Breg)c - 2c'b with Breg in {I, B, B_rkhs}.

    When A + lam Breg is singular the minimum-norm pseudo-inverse solution
    is returned. Warns with IllConditionedWarning when the condition number
    estimate exceeds 1e14.
    """
    solver = SpectralSolver(t, kind, e, rtol)
    cond = solver.condition(lam)
    if cond > COND_WARN:
        warnings.warn(f"regularised normal matrix has condition ~{cond:.2e}",
                      IllConditionedWarning, stacklevel=2)
    return solver.coefficients(lam)


@dataclass(frozen=True)
class RieszData:
    """Discrete representative of the Riesz function of the data functional.

    ``values[k] = g^f(r_k) dx / rho_k`` on bins with positive mass, NaN elsewhere.
    """
    r: np.ndarray
    values: np.ndarray


def riesz_data(reg: RegressionData) -> RieszData:
    w = reg.rho.weights
    vals = np.full(reg.K, np.nan)
    pos = w > 0
    vals[pos] = reg.gf[pos] * reg.dx / w[pos]
    return RieszData(reg.r, vals)


@dataclass
class KernelEstimate:
    space: HypothesisSpace
    coefficients: np.ndarray
    lam: float
    loss: float
    regularizer: RegularizerKind
    spectrum: GenEig | None = None
    diagnostics: dict = field(default_factory=dict)

    def __call__(self, r) -> np.ndarray:
        return self.space.basis.evaluate(self.coefficients, r)

    @property
    def support_radius(self) -> float:
        return float(self.space.basis.knots[-1])

    def to_json(self) -> dict:
        eig = [] if self.spectrum is None else self.spectrum.eigenvalues.tolist()
        return {
            "knots": self.space.basis.knots.tolist(),
            "degree": self.space.basis.degree,
            "coefficients": np.asarray(self.coefficients).tolist(),
            "lambda": self.lam,
            "regularizer": self.regularizer.value,
            "loss": self.loss,
            "eigenvalues": eig,
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def from_json(cls, obj: dict) -> "KernelEstimate":
        from .basis import BSplineBasis
        space = HypothesisSpace(BSplineBasis(obj["knots"], obj["degree"]))
        return cls(space, np.asarray(obj["coefficients"], dtype=float), obj["lambda"],
                   obj["loss"], RegularizerKind.parse(obj["regularizer"]))

    @classmethod
    def load(cls, path) -> "KernelEstimate":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def relative_l2rho_error(estimate, truth, rho: ExplorationMeasure) -> float:
    """||phi_hat - phi_true||_{L2(rho)} / ||phi_true||_{L2(rho)} on the bins of rho.

    ``estimate`` and ``truth`` are callables of r (a KernelEstimate, a
    RadialKernel, or any vectorised function).
    """
    r, w = rho.r, rho.weights
    tv = np.asarray(truth(r), dtype=float)
    ev = np.asarray(estimate(r), dtype=float)
    den = float(np.sum(tv ** 2 * w))
    if den <= 0:
        raise ZeroTruth("true kernel vanishes on the support of rho")
    return float(np.sqrt(np.sum((ev - tv) ** 2 * w) / den))
