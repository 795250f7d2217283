"""Synthesis problem construction, the robust LMI and the cancellation program."""
from __future__ import annotations


import numpy as np
import pytest

from kernel_control.core.enums import SolverStatus
from kernel_control.core.errors import ExcitationError, InputError, SynthesisInfeasibleError
from kernel_control.plant import ForcedDataset, load_fixture
from kernel_control.synthesis import (
    SynthesisProblem,
    SynthesisResult,
    assemble_lmi,
    build_problem,
    closed_loop_matrices,
    least_squares_cancellation,
    nominal_closed_loop,
    right_inverse,
    sample_contractions,
    schur_reduced_lmi,
    spectral_radius,
    synthesize,
    uncertainty_bound,
)


def _scalar_problem(delta: float) -> SynthesisProblem:
    return SynthesisProblem.from_matrices(
        Abar=[[1.5]], Ahat=[[0.0]], Xhat1=[[1.0]], U0=[[1.0]], Delta=delta, Q=[[1.0]]
    )


def _robust_residual_bound(p: SynthesisProblem, Khat: np.ndarray) -> float:
    nominal = np.linalg.norm(p.Ahat + p.input_gain @ Khat, 2)
    return float(nominal + p.delta_norm * np.linalg.norm(p.U0dag @ Khat, 2))


class TestProblem:
    def test_scalar_right_inverse(self):
        assert np.allclose(right_inverse([[2.0]]), [[0.5]])

    def test_right_inverse_is_right_inverse(self, rng):
        U0 = rng.normal(size=(2, 6))
        assert np.allclose(U0 @ right_inverse(U0), np.eye(2))

    def test_pythagorean_delta(self):
        assert np.allclose(uncertainty_bound([3.0, 4.0], 2), 5.0 * np.eye(2))

    def test_zero_delta(self):
        assert np.all(uncertainty_bound([0.0, 0.0, 0.0], 2) == 0.0)

    def test_q_must_be_positive_definite(self):
        with pytest.raises(InputError):
            SynthesisProblem.from_matrices(
                Abar=[[1.5]], Ahat=[[0.0]], Xhat1=[[1.0]], U0=[[1.0]], Delta=0.0, Q=[[0.0]]
            )

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            SynthesisProblem.from_matrices(
                Abar=np.eye(2), Ahat=np.zeros((2, 3)), Xhat1=np.zeros((2, 4)), U0=np.ones((1, 3)), Delta=0.0, Q=np.eye(2)
            )

    def test_excitation_gate(self, example_run):
        f = example_run.forced
        broken = ForcedDataset(Xbar0=f.Xbar0, Xbar1=f.Xbar1, U0=np.zeros_like(f.U0), K0=f.K0)
        with pytest.raises(ExcitationError):
            build_problem(example_run.model, broken, example_run.bound, np.eye(2), 1.0)

    def test_fixture_problem(self, example_run):
        p = example_run.problem
        assert (p.n, p.m, p.Tbar, p.S) == (2, 1, 10, 10)
        assert np.allclose(p.input_gain, [[1.0], [0.0]], atol=1e-2)
        assert p.delta_norm > 0.0

    def test_experimental_diagonal_delta(self, example_run):
        p = build_problem(
            example_run.model, example_run.forced, example_run.bound, np.eye(2), 1.0, experimental_diagonal_delta=True
        )
        diag = np.diag(p.Delta)
        assert diag[0] > diag[1] > 0.0


class TestLmi:
    def test_block_diagonal_case(self, rng):
        p = SynthesisProblem.from_matrices(
            Abar=np.zeros((2, 2)),
            Ahat=np.zeros((2, 3)),
            Xhat1=np.zeros((2, 3)),
            U0=rng.normal(size=(1, 3)),
            Delta=0.0,
            Q=np.eye(2),
        )
        lmi = assemble_lmi(p, 2.0 * np.eye(2), np.zeros((1, 2)), 1.0)
        assert np.allclose(lmi.block(0, 0), np.eye(2))
        assert np.allclose(lmi.block(1, 1), 2.0 * np.eye(2))
        assert np.allclose(lmi.block(2, 2), np.eye(3))
        assert np.all(lmi.block(0, 1) == 0.0)
        assert lmi.is_psd()
        assert not assemble_lmi(p, 0.5 * np.eye(2), np.zeros((1, 2)), 1.0).is_psd()

    def test_schur_reduction_agrees(self, rng):
        for _ in range(50):
            p = SynthesisProblem.from_matrices(
                Abar=0.5 * rng.normal(size=(2, 2)),
                Ahat=np.zeros((2, 1)),
                Xhat1=rng.normal(size=(2, 4)),
                U0=rng.normal(size=(1, 4)),
                Delta=0.2,
                Q=0.5 * np.eye(2),
            )
            P = np.eye(2) * rng.uniform(1.0, 3.0)
            Y = 0.3 * rng.normal(size=(1, 2))
            eps = rng.uniform(0.5, 2.0)
            full = assemble_lmi(p, P, Y, eps).min_eig
            reduced = float(np.linalg.eigvalsh(schur_reduced_lmi(p, P, Y, eps))[0])
            if min(abs(full), abs(reduced)) > 1e-9:
                assert (full > 0) == (reduced > 0)

    def test_schur_needs_positive_eps(self):
        with pytest.raises(InputError):
            schur_reduced_lmi(_scalar_problem(0.0), [[1.0]], [[0.0]], 0.0)

    def test_decision_shapes(self):
        with pytest.raises(InputError):
            assemble_lmi(_scalar_problem(0.0), np.eye(2), [[0.0]], 1.0)


class TestSynthesize:
    def test_scalar_toy_is_stabilized(self, backend):
        p = _scalar_problem(0.0)
        r = synthesize(p, backend=backend)
        Psi0, _ = closed_loop_matrices(r, p)
        assert abs(Psi0[0, 0]) < 1.0
        assert r.status in (SolverStatus.OPTIMAL, SolverStatus.OPTIMAL_INACCURATE)
        assert r.P[0, 0] >= 1.0 - 1e-6

    def test_large_uncertainty_is_infeasible(self, backend):
        with pytest.raises(SynthesisInfeasibleError) as info:
            synthesize(_scalar_problem(1e3), backend=backend)
        assert info.value.delta_norm == pytest.approx(1e3)

    def test_negative_margin(self, backend):
        with pytest.raises(InputError):
            synthesize(_scalar_problem(0.0), backend=backend, margin=-1.0)

    def test_fixture_cancels_first_row(self, example_run):
        r = example_run.result
        assert np.linalg.norm(r.residual[0]) <= 1e-3
        assert np.allclose(r.residual, example_run.problem.Ahat + example_run.problem.input_gain @ r.Khat)

    def test_fixture_is_stable(self, example_run):
        Psi0, _ = closed_loop_matrices(example_run.result, example_run.problem)
        assert spectral_radius(Psi0) < 1.0

    def test_fixture_lmi_holds(self, example_run):
        r = example_run.result
        lmi = assemble_lmi(example_run.problem, r.P, r.Y, r.eps)
        assert lmi.min_eig >= -1e-7
        assert np.allclose(r.Kbar @ r.P, r.Y)

    def test_fixture_nominal_closed_loop(self, example_run):
        r, p = example_run.result, example_run.problem
        assert np.allclose(nominal_closed_loop(r, p, [0.0, 0.0]), 0.0)
        assert np.allclose(nominal_closed_loop(r, p, [1.0, 1.0]), [0.2481, 0.7], atol=2e-2)

    def test_least_squares_gain_reaches_same_norm(self, example_run):
        p = example_run.problem
        Khat = least_squares_cancellation(p)
        closed_form = np.linalg.norm(p.Ahat + p.input_gain @ Khat, 2)
        assert example_run.result.cancellation_norm == pytest.approx(closed_form, abs=1e-5)

    def test_coupled_solve_matches_decoupled(self, example_run, backend):
        coupled = synthesize(example_run.problem, backend=backend, coupled=True, refine_cancellation=False)
        assert coupled.cancellation_norm == pytest.approx(example_run.result.cancellation_norm, abs=1e-4)
        assert coupled.P_norm == pytest.approx(example_run.result.P_norm, rel=1e-3)

    def test_robust_surrogate_trades_cancellation_for_gain(self, backend):
        p = SynthesisProblem.from_matrices(
            Abar=[[0.5]], Ahat=[[1.0]], Xhat1=[[1.0]], U0=[[1.0]], Delta=2.0, Q=[[1.0]]
        )
        plain = synthesize(p, backend=backend)
        robust = synthesize(p, backend=backend, robust_cancellation_surrogate=True)
        assert plain.Khat[0, 0] == pytest.approx(-1.0, abs=1e-4)
        assert robust.Khat[0, 0] == pytest.approx(0.0, abs=1e-4)
        assert _robust_residual_bound(p, robust.Khat) == pytest.approx(1.0, abs=1e-4)

    def test_fixture_robust_surrogate_bounds_every_draw(self, example_run, backend, rng):
        p = example_run.problem
        r = synthesize(p, backend=backend, robust_cancellation_surrogate=True)
        assert r.lmi_min_eig >= -1e-7 * max(1.0, float(np.max(np.abs(assemble_lmi(p, r.P, r.Y, r.eps).M))))
        bound = _robust_residual_bound(p, r.Khat)
        assert bound <= _robust_residual_bound(p, example_run.result.Khat) + 1e-5
        for W in sample_contractions(rng, p.n, p.Tbar, 300):
            D = p.Delta @ W
            assert np.linalg.norm(p.Ahat + (p.Xhat1 - D) @ p.U0dag @ r.Khat, 2) <= bound + 1e-9

    def test_result_payload(self, example_run):
        r = example_run.result
        back = SynthesisResult.from_payload(r.payload(), nonlinear=r.nonlinear)
        assert np.array_equal(back.Khat, r.Khat)
        assert back.status is r.status
