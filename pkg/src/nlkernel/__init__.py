"""Learning radial kernels of nonlocal operators with data-adaptive RKHS regularisation."""
from .assembly import RegressionData, Triplet, assemble_triplet, regression_data
from .basis import BSplineBasis, HypothesisSpace, dimension_ladder, make_space
from .errors import *  # noqa: F401,F403
from .explore import ExplorationMeasure, estimate_support, exploration_measure
from .grid import DataPair, Dataset, NoiseSpec, SampledFunction, UniformGrid, add_noise, l2_norm
from .lcurve import LCurve, lambda_range, select_lambda
from .operator import RadialKernel, TrueKernelSpec, apply_quadrature, apply_riemann, make_true_kernel
from .pipeline import fit, prepare, run_algorithm1
from .solve import (GenEig, KernelEstimate, RegularizerKind, SpectralSolver, gen_eig,
                    relative_l2rho_error, rkhs_norm_matrix, solve_regularized)
from .synthetic import synthetic_dataset

__version__ = "0.1.0"
