"""End-to-end kernel learning: exploration measure, regression data, dimension sweep."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field


from .assembly import RegressionData, assemble_triplet, regression_data
from .basis import dimension_ladder, make_space
from .errors import AllSpacesSingular, DegenerateData, FactorizationFailure, SingularBasis
from .explore import ExplorationMeasure, SupportEstimate, estimate_support, exploration_measure
from .grid import Dataset
from .lcurve import GRID_SIZE, select_lambda
from .solve import KernelEstimate, RegularizerKind, SpectralSolver, fsoi_spectrum, gen_eig


@dataclass
class Prepared:
    """Everything learned from one pass over the data."""
    rho_full: ExplorationMeasure
    support: SupportEstimate | None
    reg: RegressionData

    @property
    def R(self) -> float:
        return self.reg.R

    @property
    def rho(self) -> ExplorationMeasure:
        return self.reg.rho


def prepare(d: Dataset, support_radius: float | None = None, R0cap: float | None = None,
            threshold: float = 1e-8, extension: str = "zero",
            skip_empty: bool = False) -> Prepared:
    """Steps 1-2: exploration measure, support radius R, regression data on [0, R]."""
    if len(d) == 0:
        raise DegenerateData("empty dataset")
    rho = exploration_measure(d, R0cap)
    support = None
    if support_radius is None:
        support = estimate_support(d, rho, threshold, skip_empty=skip_empty)
        support_radius = support.R
    return Prepared(rho, support, regression_data(d, rho.truncate(support_radius), extension))


@dataclass
class Candidate:
    n: int
    status: str
    lam: float = float("nan")
    loss: float = float("nan")
    rank: int = 0
    estimate: KernelEstimate | None = field(default=None, repr=False)


def fit(prep: Prepared, kind="rkhs", degree: int = 2, dims=None, ladder_size: int = 8,
        lam: float | None = None, grid_size: int = GRID_SIZE) -> KernelEstimate:
    """Steps 3-5: per dimension triplet, eigenpairs, L-curve, then minimal-loss n."""
    kind = RegularizerKind.parse(kind)
    reg = prep.reg
    if dims is None:
        dims = dimension_ladder(reg.R, reg.dx, degree, ladder_size)
    candidates: list[Candidate] = []
    for n in dims:
        space = make_space(reg.R, n, degree)
        try:
            t = assemble_triplet(reg, space)
            e = gen_eig(t)
        except (SingularBasis, FactorizationFailure):
            candidates.append(Candidate(n, "singular"))
            continue
        solver = SpectralSolver(t, kind, e)
        curve = None
        if lam is None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                lam_n, curve = select_lambda(t, kind, e, grid_size, solver=solver)
        else:
            lam_n = lam
        c = solver.coefficients(lam_n)
        loss = t.loss(c)
        est = KernelEstimate(space, c, lam_n, loss, kind, e, {"lcurve": curve})
        candidates.append(Candidate(n, "ok", lam_n, loss, fsoi_spectrum(e)[0], est))
    ok = [c for c in candidates if c.status == "ok"]
    if not ok:
        raise AllSpacesSingular(f"every dimension in {list(dims)} gave a singular basis matrix")
    best = min(ok, key=lambda c: (c.loss, c.n))
    est = best.estimate
    est.diagnostics.update({
        "R": reg.R,
        "support": prep.support,
        "rho": reg.rho,
        "n": best.n,
        "candidates": candidates,
    })
    return est


def run_algorithm1(d: Dataset, degree: int = 2, kind="rkhs", *,
                   support_radius: float | None = None, R0cap: float | None = None,
                   dims=None, ladder_size: int = 8, lam: float | None = None,
                   grid_size: int = GRID_SIZE, extension: str = "zero",
                   threshold: float = 1e-8) -> KernelEstimate:
    """Learn a radial kernel from data with the chosen regulariser.

    ``support_radius`` overrides the data-driven R; ``lam`` fixes the
    regularisation strength instead of running the L-curve; ``dims`` replaces
    the default dimension ladder over floor(R/dx) * [0.2, 1].
    """
    prep = prepare(d, support_radius, R0cap, threshold, extension)
    return fit(prep, kind, degree, dims, ladder_size, lam, grid_size)
