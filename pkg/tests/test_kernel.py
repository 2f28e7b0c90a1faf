import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svddsel.dataset import Dataset
from svddsel.kernel import GramMatrix, cross_kernel, gauss_kernel, gram_matrix

coords = st.floats(allow_nan=False, allow_infinity=False, min_value=-100, max_value=100)


class TestGaussKernel:
    def test_zero_distance(self):
        assert gauss_kernel([1.5, -2.0], [1.5, -2.0], 0.37) == 1.0

    def test_unit_distance(self):
        # exp(-1) frozen from the closed form
        assert gauss_kernel([0.0], [1.0], 1.0) == pytest.approx(
            0.36787944117144233, abs=0.0
        )

    def test_large_gamma_limit(self):
        assert gauss_kernel([0.0], [1.0], 1e12) == pytest.approx(1.0, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            gauss_kernel([0.0], [1.0, 2.0], 1.0)

    def test_invalid_gamma(self):
        for bad in (0.0, -1.0, np.inf, np.nan):
            with pytest.raises(ValueError):
                gauss_kernel([0.0], [1.0], bad)

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(coords, min_size=1, max_size=4),
        st.lists(coords, min_size=1, max_size=4),
        st.floats(min_value=0.01, max_value=1e4),
        st.floats(min_value=1.01, max_value=10.0),
    )
    def test_strictly_increasing_in_gamma(self, x, y, gamma, factor):
        if len(x) != len(y) or x == y:
            return
        assert gauss_kernel(x, y, gamma * factor) > gauss_kernel(x, y, gamma)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(coords, min_size=2, max_size=4), st.floats(min_value=0.1, max_value=100))
    def test_range(self, x, gamma):
        y = [c + 1.0 for c in x]
        v = gauss_kernel(x, y, gamma)
        assert 0.0 < v <= 1.0


class TestGramMatrix:
    def test_single_point(self):
        g = gram_matrix(Dataset(points=[[2.0, 3.0]]), 1.0)
        assert g.values.shape == (1, 1) and g.values[0, 0] == 1.0

    def test_identical_points_give_all_ones(self):
        g = gram_matrix(Dataset(points=[[1.0, 1.0], [1.0, 1.0]]), 0.5)
        assert np.array_equal(g.values, np.ones((2, 2)))

    def test_exact_symmetry_and_unit_diagonal(self):
        rng = np.random.default_rng(0)
        g = gram_matrix(Dataset(points=rng.normal(size=(23, 3))), 2.0)
        assert np.array_equal(g.values, g.values.T)
        assert np.all(np.diag(g.values) == 1.0)

    def test_positive_semidefinite_within_tolerance(self):
        # dense symmetric eigenvalue solver as the oracle
        rng = np.random.default_rng(1)
        for l in (10, 30, 50):
            g = gram_matrix(Dataset(points=rng.normal(size=(l, 4))), 1.0)
            assert np.linalg.eigvalsh(g.values).min() >= -1e-8

    def test_cross_kernel_matches_pairwise(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(5, 3))
        y = rng.normal(size=(4, 3))
        k = cross_kernel(x, y, 1.7)
        for i in range(5):
            for j in range(4):
                assert k[i, j] == pytest.approx(gauss_kernel(x[i], y[j], 1.7), rel=1e-15)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError, match="symmetric"):
            GramMatrix(values=[[1.0, 0.2], [0.3, 1.0]], gamma=1.0)
        with pytest.raises(ValueError, match="diagonal"):
            GramMatrix(values=[[0.9, 0.2], [0.2, 0.9]], gamma=1.0)
        with pytest.raises(ValueError, match="square"):
            GramMatrix(values=[[1.0, 0.2]], gamma=1.0)

    def test_underflow_entries_accepted(self):
        # far points at tiny gamma underflow to exactly 0; sweeps rely on this
        g = gram_matrix(Dataset(points=[[0.0], [1000.0]]), 1e-3)
        assert g.values[0, 1] == 0.0

    def test_upper_triangle_order(self):
        g = gram_matrix(Dataset(points=[[0.0], [1.0], [3.0]]), 10.0)
        ut = g.upper_triangle()
        assert ut.shape == (3,)
        assert ut[0] == g.values[0, 1]
        assert ut[1] == g.values[0, 2]
        assert ut[2] == g.values[1, 2]
