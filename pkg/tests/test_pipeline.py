import numpy as np
import pytest

from nlkernel.basis import make_space
from nlkernel.errors import AllSpacesSingular, DegenerateData
from nlkernel.grid import Dataset, SampledFunction, UniformGrid
from nlkernel.operator import RadialKernel, TrueKernelSpec, apply_riemann, make_true_kernel
from nlkernel.pipeline import fit, prepare, run_algorithm1
from nlkernel.solve import relative_l2rho_error
from nlkernel.synthetic import synthetic_dataset


def in_span_data(seed=0, R=2.0, n=8, J=201, N=3, dx=0.05):
    rng = np.random.default_rng(seed)
    space = make_space(R, n, 2)
    c = rng.standard_normal(n)
    phi = RadialKernel(lambda r: space.basis.evaluate(c, r), R)
    grid = UniformGrid(-0.5 * dx * (J - 1), dx, J)
    U = rng.standard_normal((N, J))
    F = np.stack([apply_riemann(phi, SampledFunction(grid, u)).values for u in U])
    return Dataset.from_arrays(grid, U, F), phi


@pytest.mark.parametrize("kind", ["l2", "L2", "rkhs"])
def test_in_span_recovery_lambda_zero(kind):
    d, phi = in_span_data()
    est = run_algorithm1(d, 2, kind, support_radius=2.0, dims=[8], lam=0.0)
    assert relative_l2rho_error(est, phi, est.diagnostics["rho"]) < 1e-6


def test_empty_dataset():
    with pytest.raises(DegenerateData):
        run_algorithm1(Dataset(()))


def test_all_spaces_singular():
    d, _ = in_span_data()
    with pytest.raises(AllSpacesSingular):
        # more functions than distance bins
        run_algorithm1(d, 2, "rkhs", support_radius=0.5, dims=[30, 40])


def test_minimal_loss_dimension_is_chosen():
    d, _ = in_span_data(seed=1)
    est = run_algorithm1(d, 2, "L2", support_radius=2.0, dims=[4, 8, 12], lam=0.0)
    cands = [c for c in est.diagnostics["candidates"] if c.status == "ok"]
    assert est.diagnostics["n"] == min(cands, key=lambda c: c.loss).n
    assert len(cands) == 3


def test_gaussian_synthetic_run():
    spec = TrueKernelSpec("gaussian")
    prep = prepare(synthetic_dataset(spec, 0.1))
    assert abs(prep.R - 11.66) < 0.2
    est = fit(prep, "rkhs")
    err = relative_l2rho_error(est, make_true_kernel(spec), prep.rho)
    assert err < 0.01
    curve = est.diagnostics["lcurve"]
    assert curve.lambdas[0] < est.lam < curve.lambdas[-1]


def test_prepare_override_and_rho_truncation():
    d = synthetic_dataset(TrueKernelSpec("sine"), 0.2, (-20.0, 20.0))
    prep = prepare(d, support_radius=5.0)
    assert prep.support is None and prep.R == 5.0
    assert prep.rho.r[-1] <= 5.0 + 1e-12
    assert abs(prep.rho.weights.sum() - 1) < 1e-12
