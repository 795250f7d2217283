"""Regularized kernel interpolation and its deterministic error bound."""
from __future__ import annotations

import numpy as np
import pytest

from kernel_control.core.errors import InputError, SingularGramError
from kernel_control.interp import (
    DriftDataset,
    ErrorBound,
    cost_with_coefficients,
    delta,
    delta_batch,
    fit,
    power_function,
    power_function_batch,
    predict,
    predict_batch,
    regularized_cost,
)
from kernel_control.kernels import KernelSpec
from kernel_control.plant import load_fixture

POLY3 = KernelSpec.polynomial(1.0, 1.0, 1.0)
GAUSS = KernelSpec.gaussian(1.0)


def _gaussian_data(rng, T=8, n=2):
    X0 = rng.uniform(-2, 2, size=(n, T))
    X1 = np.vstack([np.sin(X0[0]) + X0[1], np.cos(X0[1]) * X0[0]])[:n]
    return DriftDataset(X0=X0, X1=X1)


class TestFit:
    def test_single_center(self):
        data = DriftDataset(X0=[[1.0], [0.0]], X1=[[6.0], [0.0]])
        m = fit(data, POLY3, 0.0)
        assert np.allclose(m.A, [[2.0], [0.0]])
        assert np.allclose(predict(m, [1.0, 0.0]), [6.0, 0.0])

    def test_exact_interpolation_with_pd_kernel(self, rng):
        data = _gaussian_data(rng)
        m = fit(data, GAUSS, 0.0)
        assert np.max(np.abs(predict_batch(m, data.X0) - data.X1)) <= 1e-8
        assert np.all(power_function_batch(m, data.X0) <= 1e-6)

    def test_zero_lambda_on_singular_gram(self, rng):
        X0 = rng.uniform(-1, 1, size=(2, 4))
        X0 = np.hstack([X0, X0[:, :1]])
        data = DriftDataset(X0=X0, X1=X0)
        with pytest.raises(SingularGramError):
            fit(data, GAUSS, 0.0)

    def test_negative_lambda(self, rng):
        with pytest.raises(InputError):
            fit(_gaussian_data(rng), GAUSS, -1e-3)

    def test_fixture_residual(self):
        drift, _, constants = load_fixture("paper-sec4")
        m = fit(drift, constants.kernel, constants.lam)
        assert m.fit_residual(drift.X1) <= 1e-8

    def test_predict_at_origin_is_zero(self):
        drift, _, constants = load_fixture("paper-sec4")
        m = fit(drift, constants.kernel, constants.lam)
        assert np.all(predict(m, [0.0, 0.0]) == 0.0)

    def test_predict_dimension_mismatch(self, rng):
        m = fit(_gaussian_data(rng), GAUSS, 1e-3)
        with pytest.raises(InputError):
            predict(m, [1.0, 2.0, 3.0])


class TestRegularizedCost:
    def test_zero_for_exact_interpolation(self, rng):
        data = _gaussian_data(rng)
        m = fit(data, GAUSS, 0.0)
        assert regularized_cost(m, data, 0) == pytest.approx(0.0, abs=1e-12)

    def test_interpolant_minimizes_cost(self, rng):
        data = _gaussian_data(rng)
        m = fit(data, GAUSS, 1e-3)
        for row in range(m.n):
            best = regularized_cost(m, data, row)
            for _ in range(1000):
                alpha = m.A[row] + rng.choice([-0.01, 0.01], size=m.T)
                assert cost_with_coefficients(m, data, row, alpha) >= best - 1e-12 * max(1.0, best)

    def test_row_out_of_range(self, rng):
        data = _gaussian_data(rng)
        m = fit(data, GAUSS, 1e-3)
        with pytest.raises(InputError):
            regularized_cost(m, data, 2)


class TestPowerFunction:
    def test_zero_at_origin_for_polynomial_kernel(self):
        drift, _, constants = load_fixture("paper-sec4")
        m = fit(drift, constants.kernel, constants.lam)
        assert power_function(m, [0.0, 0.0]) == 0.0

    def test_matches_dense_solve(self, rng):
        data = _gaussian_data(rng)
        lam = 1e-3
        m = fit(data, GAUSS, lam)
        x = np.array([0.3, -0.7])
        K = GAUSS.matrix(data.X0, data.X0)
        k = GAUSS.matrix(data.X0, x[:, None])[:, 0]
        R = K + lam * np.eye(m.T)
        z = np.linalg.solve(R, k)
        expected = np.sqrt(1.0 - z @ (K + 2 * lam * np.eye(m.T)) @ z)
        assert power_function(m, x) == pytest.approx(expected, abs=1e-8)

    def test_monotone_in_lambda(self, rng):
        data = _gaussian_data(rng)
        pts = rng.uniform(-3, 3, size=(2, 200))
        for lam in (1e-4, 1e-3, 1e-2):
            small = power_function_batch(fit(data, GAUSS, lam), pts)
            large = power_function_batch(fit(data, GAUSS, 10 * lam), pts)
            assert np.all(large >= small - 1e-10)


class TestErrorBound:
    def test_zero_gamma(self, rng):
        m = fit(_gaussian_data(rng), GAUSS, 1e-3)
        b = ErrorBound(gamma=[0.0, 0.0], model=m)
        assert np.all(delta_batch(b, rng.normal(size=(2, 10))) == 0.0)

    def test_gamma_length_checked(self, rng):
        m = fit(_gaussian_data(rng), GAUSS, 1e-3)
        with pytest.raises(InputError):
            ErrorBound(gamma=[1.0], model=m)

    def test_fixture_bound_at_one_one(self):
        drift, _, constants = load_fixture("paper-sec4")
        m = fit(drift, constants.kernel, constants.lam)
        b = ErrorBound(gamma=constants.gamma, model=m)
        x = np.array([1.0, 1.0])
        assert delta(b, x) == pytest.approx(np.linalg.norm([3.0, 0.4]) * power_function(m, x))
        assert np.linalg.norm(predict(m, x) - [2.0, 0.7]) <= delta(b, x) + 1e-6

    @pytest.mark.parametrize(
        "kernel,lam",
        [(GAUSS, 0.0), (GAUSS, 1e-7), (GAUSS, 1e-3), (POLY3, 1e-3)],
    )
    def test_bound_holds_for_known_rkhs_members(self, kernel, lam):
        rng = np.random.default_rng(7)
        pts = rng.uniform(-2.5, 2.5, size=(2, 10_000))
        for _ in range(50):
            Z = rng.uniform(-2, 2, size=(2, 3))
            beta = rng.normal(size=(2, 3))
            norms = np.sqrt(np.einsum("ij,jk,ik->i", beta, kernel.matrix(Z, Z), beta))
            X0 = rng.uniform(-2, 2, size=(2, 10))
            data = DriftDataset(X0=X0, X1=beta @ kernel.matrix(Z, X0))
            m = fit(data, kernel, lam)
            err = np.abs(beta @ kernel.matrix(Z, pts) - predict_batch(m, pts))
            bound = norms[:, None] * power_function_batch(m, pts)[None, :]
            assert np.all(err <= bound + 1e-9)
