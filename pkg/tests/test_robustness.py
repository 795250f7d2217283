"""Randomized checks that a feasible robust LMI certifies the whole uncertainty set."""
from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import solve

from kernel_control.core.errors import InputError
from kernel_control.synthesis import (
    SynthesisProblem,
    SynthesisResult,
    assemble_lmi,
    petersen_check,
    sample_contractions,
    verify_robust_condition,
)
from kernel_control.synthesis.robustness import PETERSEN_REL_TOL


def _result(P: np.ndarray, Y: np.ndarray, eps: float, p: SynthesisProblem) -> SynthesisResult:
    zeros = np.zeros((p.m, p.S))
    return SynthesisResult(
        P=P,
        Y=Y,
        eps=eps,
        Kbar=solve(P, Y.T, assume_a="pos").T,
        Khat=zeros,
        residual=p.Ahat + p.input_gain @ zeros,
        objective=0.0,
        cancellation_norm=0.0,
    )


def _feasible_instance(rng: np.random.Generator):
    """Random (problem, P, Y, eps) whose Q is chosen so that the robust LMI holds strictly."""
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 3))
    Tbar = int(rng.integers(m, 7))
    Abar = 0.3 * rng.normal(size=(n, n))
    Xhat1 = rng.normal(size=(n, Tbar))
    U0 = rng.normal(size=(m, Tbar))
    Delta = np.diag(rng.uniform(0.0, 0.3, size=n))
    R = 0.1 * rng.normal(size=(n, n))
    P = np.eye(n) + 0.5 * (R + R.T)
    Y = 0.2 * rng.normal(size=(m, n))
    eps = float(rng.uniform(0.1, 1.0))

    base = SynthesisProblem.from_matrices(Abar, np.zeros((n, 1)), Xhat1, U0, Delta, np.eye(n))
    if np.linalg.eigvalsh(P)[0] < 0.5:
        return None
    lower = P - eps * Delta @ Delta
    if np.linalg.eigvalsh(lower)[0] < 0.05:
        return None
    G = Abar @ P + base.input_gain @ Y
    H = base.U0dag @ Y
    Q = P - H.T @ H / eps - G.T @ solve(lower, G, assume_a="pos") - 1e-3 * np.eye(n)
    Q = 0.5 * (Q + Q.T)
    if np.linalg.eigvalsh(Q)[0] < 1e-3:
        return None
    p = replace(base, Q=Q)
    return p, P, Y, eps


class TestSampling:
    def test_contractions(self, rng):
        W = sample_contractions(rng, 3, 5, 400)
        norms = np.linalg.norm(W, ord=2, axis=(1, 2))
        assert np.all(norms <= 1.0 + 1e-12)
        assert np.sum(np.isclose(norms, 1.0)) >= 100

    def test_scaled_draws_respect_gram_bound(self, rng):
        Delta = np.array([[1.0, 0.8], [0.0, 0.5]])
        for W in sample_contractions(rng, 2, 4, 200):
            D = Delta @ W
            assert np.linalg.eigvalsh(D @ D.T - Delta @ Delta.T)[-1] <= 1e-12


class TestPetersen:
    def test_tight_scalar_case(self):
        report = petersen_check([[1.0]], [[1.0]], [[1.0]], 1.0, 1, samples=[[[1.0]]])
        assert report.ok
        assert report.max_eig == pytest.approx(0.0, abs=1e-12)
        assert report.tol == pytest.approx(4e-9)

    def test_tolerance_scales_with_magnitude(self):
        report = petersen_check([[10.0]], [[10.0]], [[1.0]], 1.0, 1, samples=[[[0.5]]])
        assert report.ok
        assert report.tol == pytest.approx(1e-9 * (100.0 + 200.0))
        assert report.tol > PETERSEN_REL_TOL

    def test_zero_uncertainty_draw(self, rng):
        E = rng.normal(size=(3, 4))
        F = rng.normal(size=(2, 3))
        report = petersen_check(E, F, np.eye(2), 0.7, 1, samples=np.zeros((1, 2, 4)))
        assert report.ok
        assert report.max_eig <= 0.0 + 1e-12

    def test_random_instances(self, rng):
        for _ in range(20):
            E = rng.normal(size=(3, 3))
            F = rng.normal(size=(3, 3))
            Delta = np.diag(rng.uniform(0.1, 2.0, size=3))
            report = petersen_check(E, F, Delta, float(rng.uniform(0.05, 5.0)), 1000, int(rng.integers(1 << 30)))
            assert report.ok

    def test_eps_must_be_positive(self):
        with pytest.raises(InputError):
            petersen_check([[1.0]], [[1.0]], [[1.0]], 0.0, 10)


class TestRobustCondition:
    def test_feasible_lmi_implies_robust_condition(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(1000):
            instance = _feasible_instance(rng)
            if instance is None:
                continue
            p, P, Y, eps = instance
            if not assemble_lmi(p, P, Y, eps).is_psd(1e-9):
                continue
            checked += 1
            seed = int(rng.integers(1 << 30))
            report = verify_robust_condition(_result(P, Y, eps, p), p, 100, seed)
            assert report.max_eig <= 1e-7
            E = (p.U0dag @ Y).T
            F = p.Abar @ P + p.input_gain @ Y
            assert petersen_check(E, F, p.Delta, eps, 1000, seed).ok
        assert checked >= 100

    def test_zero_delta_checks_only_nominal(self):
        p = SynthesisProblem.from_matrices(
            Abar=[[1.5]], Ahat=[[0.0]], Xhat1=[[1.0]], U0=[[1.0]], Delta=0.0, Q=[[1.0]]
        )
        r = _result(np.array([[2.0]]), np.array([[-3.0]]), 1.0, p)
        report = verify_robust_condition(r, p, 50)
        assert report.num_samples == 1
        assert report.max_eig == pytest.approx(-1.0)

    def test_fixture_controller(self, example_run):
        report = verify_robust_condition(example_run.result, example_run.problem, 100, 0)
        assert report.max_eig <= 1e-7
        assert report.ok

    def test_corrupted_gain_is_caught(self, example_run):
        broken = replace(example_run.result, Y=10.0 * example_run.result.Y)
        report = verify_robust_condition(broken, example_run.problem, 100, 0)
        assert report.violations > 0
