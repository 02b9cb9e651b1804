import numpy as np
import pytest
from scipy import interpolate

from nlkernel.basis import (BSplineBasis, basis_gram, dimension_ladder, eval_basis,
                            make_hypothesis_spaces, make_space, spline_knots)
from nlkernel.errors import InvalidRange
from nlkernel.explore import ExplorationMeasure


def test_degree_zero_indicator():
    b = BSplineBasis([0.0, 1.0, 2.0], 0)
    assert eval_basis(b, 0, 0.5) == 1.0
    assert eval_basis(b, 0, 1.5) == 0.0
    assert eval_basis(b, 1, 2.0) == 1.0  # right end closes the last span


def test_degree_one_hat_peak():
    b = BSplineBasis([0.0, 1.0, 2.0], 1)
    assert eval_basis(b, 0, 1.0) == 1.0
    assert eval_basis(b, 0, 0.5) == 0.5


def test_partition_of_unity_degree_two(rng):
    b = make_space(10.0, 12, 2).basis
    # the extra knot at 0 leaves [0, r_p) outside the unity range
    r = rng.uniform(b.knots[2], b.knots[-3], 100)
    np.testing.assert_allclose(b.design_matrix(r).sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_matches_scipy_bspline(rng, degree):
    t = np.array([0, 0, 0.5, 1.2, 2.0, 2.5, 3.0, 3.0, 3.0, 3.0])
    b = BSplineBasis(t, degree)
    r = rng.uniform(t[degree], t[len(t) - degree - 1], 200)
    ref = interpolate.BSpline.design_matrix(r, t, degree).toarray()
    np.testing.assert_allclose(b.design_matrix(r), ref, atol=1e-13)


def test_index_bounds():
    b = BSplineBasis([0.0, 1.0, 2.0], 0)
    with pytest.raises(IndexError):
        eval_basis(b, 2, 0.5)


def test_single_extra_knot_at_zero():
    t = spline_knots(6.0, 8, 2)
    assert t[0] == t[1] == 0.0 and t[2] > 0
    assert len(t) - 1 - 2 == 8
    # degree 1: the doubled knot makes the first hat nonzero at r = 0
    b1 = BSplineBasis(spline_knots(6.0, 8, 1), 1)
    assert eval_basis(b1, 0, 0.0) == 1.0
    # degree 2: every function vanishes at 0 but the first has a nonzero slope there
    b2 = BSplineBasis(t, 2)
    assert np.all(b2.design_matrix([0.0]) == 0)
    h = 1e-6
    assert eval_basis(b2, 0, h) / h > 1.0


def test_dimension_ladder_examples():
    dims = dimension_ladder(10.0, 1.0, 2)
    assert min(dims) >= 2 and max(dims) <= 10
    assert max(dimension_ladder(11.02, 0.0125, 2)) == 881
    spaces = make_hypothesis_spaces(11.02, 0.0125, 2)
    assert len(spaces) == 8
    for h in spaces:
        assert h.dimension == len(h.basis.knots) - 1 - h.basis.degree


def test_dimension_ladder_too_small():
    with pytest.raises(InvalidRange):
        make_hypothesis_spaces(2.0, 1.0, 3)
    with pytest.raises(InvalidRange):
        make_hypothesis_spaces(2.0, 0.1, 5)


def test_gram_degree_zero_is_diag_rho(rng):
    K, dr = 12, 0.25
    w = rng.uniform(0.1, 1, K)
    w /= w.sum()
    rho = ExplorationMeasure(dr, w, K * dr)
    # one cell per bin, bins at cell centres
    b = BSplineBasis(dr * (np.arange(K + 1) + 0.5), 0)
    from nlkernel.basis import HypothesisSpace
    B = basis_gram(HypothesisSpace(b), rho)
    np.testing.assert_allclose(B, np.diag(w), atol=1e-16)


def test_gram_symmetric_psd(rng):
    w = rng.uniform(0, 1, 80)
    rho = ExplorationMeasure(0.1, w / w.sum(), 8.0)
    B = basis_gram(make_space(8.0, 20, 2), rho)
    assert np.max(np.abs(B - B.T)) == 0
    ev = np.linalg.eigvalsh(B)
    assert ev[0] >= -1e-12 * ev[-1]


def test_gram_uniform_rho_orthogonal_indicators():
    K = 10
    rho = ExplorationMeasure(1.0, np.full(K, 0.1), 10.0)
    from nlkernel.basis import HypothesisSpace
    b = BSplineBasis(np.arange(K + 1) + 0.5, 0)
    B = basis_gram(HypothesisSpace(b), rho)
    np.testing.assert_allclose(B, 0.1 * np.eye(K))
