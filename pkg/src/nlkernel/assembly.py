"""One-pass regression data {G, g^f, rho} and the triplet (A, b, B) per hypothesis space."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import HypothesisSpace, basis_gram
from .errors import SingularBasis
from .explore import ExplorationMeasure
from .grid import Dataset
from .operator import bin_count, shifted_differences

BASIS_COND_MAX = 1e12
_BLOCK_ROWS = 2_000_000


def _blocks(d: Dataset, K: int):
    """Yield slices of data pairs so that each D block stays moderately sized."""
    step = max(1, _BLOCK_ROWS // max(1, d.grid.count * K))
    for start in range(0, len(d), step):
        yield slice(start, min(start + step, len(d)))


def compute_G(d: Dataset, K: int, extension: str = "zero") -> np.ndarray:
    """G(k, l) = (1/N) sum_i sum_j D_i(j, k) D_i(j, l) dx on bins r_k = k dx."""
    N, dx = len(d), d.grid.dx
    G = np.zeros((K, K))
    for sl in _blocks(d, K):
        D = shifted_differences(d.U[sl], K, extension).reshape(-1, K)
        G += D.T @ D
    G *= dx / N
    return 0.5 * (G + G.T)


def compute_gf(d: Dataset, K: int, extension: str = "zero") -> np.ndarray:
    """g^f(k) = (1/N) sum_i sum_j D_i(j, k) f_i(x_j) dx."""
    N, dx = len(d), d.grid.dx
    gf = np.zeros(K)
    for sl in _blocks(d, K):
        D = shifted_differences(d.U[sl], K, extension)
        gf += np.einsum("ijk,ij->k", D, d.F[sl])
    return gf * dx / N


def data_constant(d: Dataset) -> float:
    """C_N^f = (1/N) sum_i ||f_i||^2."""
    return math.fsum((d.F ** 2).sum(axis=1)) * d.grid.dx / len(d)


@dataclass(frozen=True)
class RegressionData:
    dx: float
    G: np.ndarray
    gf: np.ndarray
    rho: ExplorationMeasure
    Cf: float
    extension: str = "zero"

    @property
    def K(self) -> int:
        return len(self.gf)

    @property
    def r(self) -> np.ndarray:
        return self.dx * np.arange(1, self.K + 1)

    @property
    def R(self) -> float:
        return self.rho.truncated_to

    def save(self, path) -> None:
        np.savez(path, dx=self.dx, G=self.G, gf=self.gf, weights=self.rho.weights,
                 R=self.rho.truncated_to, Cf=self.Cf, extension=self.extension)

    @classmethod
    def load(cls, path) -> "RegressionData":
        z = np.load(path)
        rho = ExplorationMeasure(float(z["dx"]), z["weights"], float(z["R"]))
        return cls(float(z["dx"]), z["G"], z["gf"], rho, float(z["Cf"]), str(z["extension"]))


def regression_data(d: Dataset, rho: ExplorationMeasure, extension: str = "zero") -> RegressionData:
    """Read the dataset once; ``rho`` must already be truncated to [0, R]."""
    K = min(bin_count(rho.truncated_to, d.grid.dx), len(rho))
    if len(rho) != K:
        rho = ExplorationMeasure(rho.dr, rho.weights[:K], rho.truncated_to)
    return RegressionData(d.grid.dx, compute_G(d, K, extension), compute_gf(d, K, extension),
                          rho, data_constant(d), extension)


@dataclass(frozen=True)
class Triplet:
    A: np.ndarray
    b: np.ndarray
    B: np.ndarray
    Cf: float

    def loss(self, c) -> float:
        """E(c) = c'Ac - 2c'b + C_f."""
        c = np.asarray(c, dtype=float)
        return float(c @ self.A @ c - 2 * c @ self.b + self.Cf)


def check_basis(B: np.ndarray, cond_max: float = BASIS_COND_MAX) -> None:
    ev = np.linalg.eigvalsh(B)
    if ev[-1] <= 0 or ev[0] <= ev[-1] / cond_max:
        raise SingularBasis(
            f"basis Gram matrix eigenvalues span [{ev[0]:.3g}, {ev[-1]:.3g}]")


def assemble_triplet(reg: RegressionData, h: HypothesisSpace, check: bool = True) -> Triplet:
    """A = Phi' G Phi dx^2, b = Phi' g^f dx, B = basis Gram matrix in L2(rho)."""
    Phi = h.basis.design_matrix(reg.r)
    dx = reg.dx
    A = Phi.T @ reg.G @ Phi * dx ** 2
    A = 0.5 * (A + A.T)
    b = Phi.T @ reg.gf * dx
    B = basis_gram(h, reg.rho)
    if check:
        check_basis(B)
    return Triplet(A, b, B, reg.Cf)
