from __future__ import annotations

import numpy as np

from ..core.enums import Verdict
from ..invariance import lyapunov_values
from ..plant import FixtureConstants, check_excitation
from ..synthesis import closed_loop_matrices, nominal_closed_loop, spectral_radius
from .pipeline import RunState
from .report import CheckResult

CANCELLATION_TOL = 1e-3
NOMINAL_MATCH_TOL = 2e-2
NOMINAL_GRID = 21
CONVERGENCE_TOL = 1e-3
CONTAINMENT_RTOL = 1e-9
GAMMA_NORM_RTOL = 1e-4
EXAMPLE_GAMMA_NORM_SQ = (2.0, 0.29)

NOT_REACHED = "not reached"


def _missing(name: str) -> CheckResult:
    return CheckResult(name=name, passed=False, detail=NOT_REACHED)


def _excitation(s: RunState, tol: float) -> CheckResult:
    if s.forced is None:
        return _missing("excitation_gate")
    report = check_excitation(s.forced.U0, tol)
    return CheckResult(
        "excitation_gate",
        report.ok,
        f"sigma_min={report.sigma_min:.3e}, tol={tol:g}",
        report.sigma_min,
    )


def _cancellation(s: RunState) -> CheckResult:
    if s.result is None:
        return _missing("cancellation_residual")
    first_row = float(np.linalg.norm(s.result.residual[0]))
    return CheckResult(
        "cancellation_residual",
        first_row <= CANCELLATION_TOL,
        f"|first row of Ahat + Xhat1 U0dag Khat| = {first_row:.3e} (tol {CANCELLATION_TOL:g})",
        first_row,
    )


def _nominal_match(s: RunState, gain: float) -> CheckResult:
    if s.result is None or s.problem is None:
        return _missing("nominal_closed_loop_match")
    axis = np.linspace(-1.0, 1.0, NOMINAL_GRID)
    x1, x2 = (a.ravel() for a in np.meshgrid(axis, axis, indexing="ij"))
    got = nominal_closed_loop(s.result, s.problem, np.vstack([x1, x2]))
    expected = np.vstack([gain * x2, 0.5 * x1 + 0.2 * x2**2])
    err = float(np.max(np.abs(got - expected)))
    return CheckResult(
        "nominal_closed_loop_match",
        err <= NOMINAL_MATCH_TOL,
        f"max deviation from [{gain:g} x2, 0.5 x1 + 0.2 x2^2] on [-1, 1]^2 is {err:.3e}",
        err,
    )


def _spectral_radius(s: RunState) -> CheckResult:
    if s.result is None or s.problem is None:
        return _missing("spectral_radius")
    Psi0, _ = closed_loop_matrices(s.result, s.problem)
    rho = spectral_radius(Psi0)
    return CheckResult("spectral_radius", rho < 1.0, f"rho(Psi0) = {rho:.4f}", rho)


def _certified(s: RunState) -> CheckResult:
    cert = s.certificate
    if cert is None:
        return _missing("pi_certified")
    return CheckResult(
        "pi_certified",
        cert.verdict is Verdict.CERTIFIED and cert.Z_empty,
        f"verdict={cert.verdict.value}, Z_empty={cert.Z_empty}, gamma={cert.cert.gamma:g}",
        cert.worst_margin,
    )


def _trajectory_checks(s: RunState) -> list[CheckResult]:
    if s.trajectories is None or s.lyapunov is None:
        return [_missing("trajectories_contained"), _missing("trajectories_converge")]
    traj, cert = s.trajectories, s.lyapunov
    V = np.stack([lyapunov_values(cert, traj.states[k]) for k in range(traj.states.shape[0])])
    worst_V = float(np.max(V)) if not traj.any_diverged else float("inf")
    contained = worst_V <= cert.gamma * (1.0 + CONTAINMENT_RTOL)
    final = np.linalg.norm(traj.final, axis=0)
    worst_final = float(np.max(final)) if final.size and not traj.any_diverged else float("inf")
    if not final.size:
        worst_final = 0.0
    return [
        CheckResult(
            "trajectories_contained",
            contained,
            f"max V along {traj.states.shape[2]} runs = {worst_V:.6g} (gamma {cert.gamma:g})",
            worst_V,
        ),
        CheckResult(
            "trajectories_converge",
            worst_final <= CONVERGENCE_TOL,
            f"max |x(final)| = {worst_final:.3e} (tol {CONVERGENCE_TOL:g})",
            worst_final,
        ),
    ]


def _gamma_norms(s: RunState) -> CheckResult:
    d = s.gamma_derivation
    if d is None:
        return _missing("gamma_norms")
    ok = d.norm_sq.shape == (2,) and bool(
        np.allclose(d.norm_sq, EXAMPLE_GAMMA_NORM_SQ, rtol=GAMMA_NORM_RTOL, atol=1e-8)
    )
    return CheckResult(
        "gamma_norms",
        ok,
        f"alpha K alpha^T = {np.round(d.norm_sq, 6).tolist()}, expected {list(EXAMPLE_GAMMA_NORM_SQ)}",
    )


def example_checks(s: RunState, constants: FixtureConstants, excitation_tol: float) -> list[CheckResult]:
    """Acceptance checks for the worked example, in pipeline order."""
    return [
        _excitation(s, excitation_tol),
        _gamma_norms(s),
        _cancellation(s),
        _nominal_match(s, constants.nominal_first_row_gain),
        _spectral_radius(s),
        _certified(s),
        *_trajectory_checks(s),
    ]
