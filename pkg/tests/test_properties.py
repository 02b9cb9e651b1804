"""Property-based checks of the algebraic invariants."""
import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from nlkernel.assembly import assemble_triplet, regression_data
from nlkernel.basis import make_space
from nlkernel.explore import exploration_measure
from nlkernel.grid import Dataset, SampledFunction, UniformGrid, l2_norm
from nlkernel.operator import RadialKernel, apply_riemann
from nlkernel.solve import SpectralSolver

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
SETTINGS = settings(max_examples=60, deadline=None)


def vectors(n):
    return arrays(np.float64, n, elements=finite)


@SETTINGS
@given(vectors(25), st.floats(-5, 5))
def test_l2_norm_homogeneous(u, c):
    f = SampledFunction(UniformGrid(0.0, 0.1, 25), u)
    assert np.isclose(l2_norm(f * c), abs(c) * l2_norm(f), rtol=1e-12, atol=1e-12)


@SETTINGS
@given(vectors(30), vectors(30), finite)
def test_operator_is_linear(u, v, a):
    g = UniformGrid(-1.5, 0.1, 30)
    phi = RadialKernel(lambda r: np.cos(r), 0.8)
    L = lambda w: apply_riemann(phi, SampledFunction(g, w)).values
    np.testing.assert_allclose(L(a * u + v), a * L(u) + L(v), atol=1e-9 * (1 + abs(a)) * 100)


@SETTINGS
@given(vectors(20), st.randoms(use_true_random=False), st.floats(0.1, 100))
def test_rho_is_permutation_and_scale_invariant(u, rnd, c):
    if np.ptp(u) == 0:
        return
    g = UniformGrid(0.0, 0.1, 20)
    U = np.stack([u, np.roll(u, 3)])
    d = Dataset.from_arrays(g, U, np.zeros_like(U))
    rho = exploration_measure(d)
    order = list(range(2))
    rnd.shuffle(order)
    perm = exploration_measure(Dataset.from_arrays(g, U[order], np.zeros_like(U)))
    scaled = exploration_measure(Dataset.from_arrays(g, c * U, np.zeros_like(U)))
    np.testing.assert_allclose(perm.weights, rho.weights, atol=1e-14)
    np.testing.assert_allclose(scaled.weights, rho.weights, rtol=1e-10, atol=1e-14)
    assert np.isclose(rho.weights.sum(), 1.0)


@SETTINGS
@given(st.integers(0, 3), st.integers(5, 12), st.floats(0.5, 20))
def test_partition_of_unity(p, n, R):
    b = make_space(R, n, p).basis
    t = b.knots
    lo, hi = t[p], t[len(t) - 1 - p]
    r = np.linspace(lo, hi, 200, endpoint=False)
    np.testing.assert_allclose(b.design_matrix(r).sum(axis=1), 1.0, atol=1e-12)


@SETTINGS
@given(st.integers(0, 10_000), st.floats(1e-8, 1e3))
def test_regularized_loss_and_penalty_trade_off(seed, lam):
    rng = np.random.default_rng(seed)
    g = UniformGrid(-2.0, 0.1, 41)
    U = rng.standard_normal((2, 41))
    d = Dataset.from_arrays(g, U, rng.standard_normal((2, 41)))
    rho = exploration_measure(d, R0cap=1.0)
    t = assemble_triplet(regression_data(d, rho), make_space(1.0, 6, 2))
    for kind in ("l2", "L2", "rkhs"):
        s = SpectralSolver(t, kind)
        # loss grows and penalty shrinks as lambda increases
        assert s.loss(2 * lam) >= s.loss(lam) - 1e-9 * abs(t.Cf)
        assert s.penalty(2 * lam) <= s.penalty(lam) * (1 + 1e-9) + 1e-300
        # the regularised solution never beats the unregularised loss
        assert s.loss(lam) >= s.loss(0.0) - 1e-9 * abs(t.Cf)
