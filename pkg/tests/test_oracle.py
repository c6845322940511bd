import math

import numpy as np
import pytest

from anchova.core import CapacityError, CoordSubset
from anchova.oracle import GridSpec, fd_mixed_derivative, integral_oracle
from anchova.tensor import TensorFunction, lp_norm_subset, mixed_derivative


def grid(n, dim, *idx):
    return GridSpec(n, CoordSubset.from_indices(idx, dim))


class TestIntegralOracle:
    def test_product(self):
        f = lambda x: x[:, 0] * x[:, 1]
        assert integral_oracle(f, {0, 1}, 1, grid(200, 2, 0, 1)) == pytest.approx(0.25, abs=1e-4)

    @pytest.mark.parametrize("p", [1, 2.5, 7])
    def test_constant(self, p):
        one = lambda x: np.ones(len(x))
        assert integral_oracle(one, {0, 2}, p, grid(13, 3, 0, 2)) == 1.0
        assert integral_oracle(one, set(), p, GridSpec(5, CoordSubset.empty(3)), dim=3) == 1.0

    def test_monomial(self):
        f = lambda x: x[:, 0]
        assert integral_oracle(f, {0}, 2, grid(200, 1, 0)) == pytest.approx(1 / 3, abs=1e-5)

    def test_base_point(self):
        f = lambda x: x[:, 0] + x[:, 1]
        val = integral_oracle(f, {0}, 1, grid(100, 2, 0), base=[0.0, 2.0])
        assert val == pytest.approx(2.5, abs=1e-12)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            integral_oracle(lambda x: x[:, 0], {0, 1, 2, 3}, 1, grid(100, 4, 0, 1, 2, 3))

    def test_mismatched_grid(self):
        with pytest.raises(ValueError):
            integral_oracle(lambda x: x[:, 0], {0}, 1, grid(10, 2, 1))

    @pytest.mark.parametrize("dim", [1, 2, 3])
    @pytest.mark.parametrize("p", [1, 1.5, 2, 3])
    def test_agrees_with_quadrature(self, random_function, dim, p):
        u = CoordSubset.full(dim)
        n_funcs = 2 if dim == 3 else 5
        for _ in range(n_funcs):
            f = random_function(dim, max_axes=dim)
            if f.is_zero():
                continue
            exact = lp_norm_subset(f, u, p) ** p
            approx = integral_oracle(f, u, p, GridSpec(200, u))
            assert approx == pytest.approx(exact, rel=1e-3, abs=1e-9)


class TestFiniteDifference:
    def test_bilinear(self):
        f = lambda x: x[:, 0] * x[:, 1]
        assert fd_mixed_derivative(f, {0, 1}, [0.5, 0.5], 1e-3) == pytest.approx(1.0, abs=1e-6)

    def test_constant(self):
        f = lambda x: np.full(len(x), 3.0)
        for u in ({0}, {1}, {0, 1}):
            assert fd_mixed_derivative(f, u, [0.4, 0.6], 1e-3) == pytest.approx(0.0, abs=1e-9)

    def test_square(self):
        f = lambda x: x[:, 0] ** 2
        assert fd_mixed_derivative(f, {0}, [0.3, 0.9], 1e-4) == pytest.approx(0.6, abs=1e-7)

    def test_leaves_cube(self):
        with pytest.raises(ValueError):
            fd_mixed_derivative(lambda x: x[:, 0], {0}, [0.0005], 1e-3)
        with pytest.raises(ValueError):
            fd_mixed_derivative(lambda x: x[:, 0], {0}, [0.5], -1.0)

    def test_second_order_convergence(self):
        # non-polynomial in every variable so that the truncation error dominates
        f = lambda x: np.exp(x[:, 0]) * np.sin(2 * x[:, 1]) * np.cos(x[:, 2])
        x = np.array([0.4, 0.3, 0.6])
        exact = math.exp(0.4) * 2 * math.cos(0.6) * -math.sin(0.6)
        errs = [abs(fd_mixed_derivative(f, {0, 1, 2}, x, h) - exact) for h in (0.04, 0.02, 0.01)]
        rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
        assert all(1.8 < r < 2.2 for r in rates)

    def test_matches_exact_derivative(self, random_function):
        x = np.array([0.35, 0.55, 0.45])
        for _ in range(10):
            f = random_function(3, max_degree=4)
            for u in ({0}, {0, 2}, {0, 1, 2}):
                exact = mixed_derivative(f, u)(x[None, :])[0]
                approx = fd_mixed_derivative(f, u, x, 1e-3)
                assert approx == pytest.approx(exact, abs=1e-4)
