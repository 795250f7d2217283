from __future__ import annotations

import logging

import cvxpy as cp
import numpy as np
from scipy.linalg import lstsq, solve

from ..core.enums import SolverStatus
from ..core.errors import InputError, SolverBackendError, SynthesisInfeasibleError
from .lmi import assemble_lmi, lmi_expression, spectral_epigraph
from .problem import SynthesisProblem
from .result import SynthesisResult
from .sdp_backend import CvxpyBackend, SdpBackend, SolveOutcome

logger = logging.getLogger(__name__)

DEFAULT_LMI_MARGIN = 1e-9
LMI_FEASTOL = 1e-7
REFINE_TOL = 1e-6
# Without uncertainty eps only enters through H^T H / eps and would run off to infinity.
ZERO_DELTA_EPS_CAP = 1e4


def _check(outcome: SolveOutcome, what: str, p: SynthesisProblem) -> None:
    if outcome.status is SolverStatus.INFEASIBLE:
        raise SynthesisInfeasibleError(
            f"{what} is infeasible ({outcome.solver}: {outcome.raw_status}); |Delta| = {p.delta_norm:.3e}",
            status=outcome.raw_status,
            delta_norm=p.delta_norm,
        )
    if outcome.status is SolverStatus.FAILED:
        raise SolverBackendError(
            f"{what}: solver {outcome.solver} returned status '{outcome.raw_status}'",
            status=outcome.raw_status,
        )
    if outcome.status is SolverStatus.OPTIMAL_INACCURATE:
        logger.warning("%s solved inaccurately by %s", what, outcome.solver)


def _cancellation_terms(p: SynthesisProblem, surrogate: bool):
    Khat = cp.Variable((p.m, p.S), name="Khat")
    t = cp.Variable(nonneg=True, name="t_cancel")
    M = p.Ahat + p.input_gain @ Khat
    constraints = [spectral_epigraph(M, t) >> 0]
    objective = t
    if surrogate:
        s = cp.Variable(nonneg=True, name="t_surrogate")
        constraints.append(spectral_epigraph(p.U0dag @ Khat, s) >> 0)
        objective = t + p.delta_norm * s
    return Khat, objective, constraints


def _lyapunov_terms(p: SynthesisProblem, margin: float, eps_cap: float | None):
    P = cp.Variable((p.n, p.n), symmetric=True, name="P")
    Y = cp.Variable((p.m, p.n), name="Y")
    eps = cp.Variable(name="eps")
    t = cp.Variable(name="t_P")
    size = 2 * p.n + p.Tbar
    constraints = [
        lmi_expression(p, P, Y, eps) >> margin * np.eye(size),
        t * np.eye(p.n) - P >> 0,
    ]
    if eps_cap is None and p.delta_norm == 0.0:
        eps_cap = ZERO_DELTA_EPS_CAP
    if eps_cap is not None:
        constraints.append(eps <= eps_cap)
    return (P, Y, eps), p.alpha * t, constraints


def _refine_cancellation(p: SynthesisProblem, backend: SdpBackend, bound: float) -> np.ndarray | None:
    """Among gains within `bound` of the optimal spectral norm pick the Frobenius-smallest residual."""
    Khat = cp.Variable((p.m, p.S), name="Khat")
    M = p.Ahat + p.input_gain @ Khat
    problem = cp.Problem(cp.Minimize(cp.norm(M, "fro")), [spectral_epigraph(M, bound) >> 0])
    outcome = backend.solve(problem)
    if outcome.status not in (SolverStatus.OPTIMAL, SolverStatus.OPTIMAL_INACCURATE):
        logger.warning("Cancellation tie-break returned %s, keeping the unrefined gain", outcome.raw_status)
        return None
    return np.atleast_2d(Khat.value)


def synthesize(
    p: SynthesisProblem,
    *,
    backend: SdpBackend | None = None,
    margin: float = DEFAULT_LMI_MARGIN,
    refine_cancellation: bool = True,
    coupled: bool = False,
    robust_cancellation_surrogate: bool = False,
    eps_cap: float | None = None,
) -> SynthesisResult:
    """Minimize |Ahat + Xhat1 U0dag Khat| + alpha |P| subject to the robust LMI.

    Khat only enters the objective and (P, Y, eps) only the LMI, so by default
    the two parts are solved as separate programs; coupled=True solves one.
    """
    if margin < 0:
        raise InputError(f"LMI margin must be >= 0, got {margin}")
    backend = backend or CvxpyBackend()
    iterations: dict[str, int | None] = {}

    Khat_var, cancel_obj, cancel_cons = _cancellation_terms(p, robust_cancellation_surrogate)
    (P_var, Y_var, eps_var), lyap_obj, lyap_cons = _lyapunov_terms(p, margin, eps_cap)

    if coupled:
        outcome = backend.solve(cp.Problem(cp.Minimize(cancel_obj + lyap_obj), cancel_cons + lyap_cons))
        _check(outcome, "Coupled synthesis program", p)
        iterations["coupled"] = outcome.iterations
        statuses = [outcome.status]
    else:
        cancel = backend.solve(cp.Problem(cp.Minimize(cancel_obj), cancel_cons))
        _check(cancel, "Cancellation program", p)
        lyap = backend.solve(cp.Problem(cp.Minimize(lyap_obj), lyap_cons))
        _check(lyap, "Robust LMI program", p)
        iterations.update(cancellation=cancel.iterations, lyapunov=lyap.iterations)
        statuses = [cancel.status, lyap.status]

    Khat = np.atleast_2d(Khat_var.value)
    if refine_cancellation and not robust_cancellation_surrogate:
        best = float(np.linalg.norm(p.Ahat + p.input_gain @ Khat, 2))
        refined = _refine_cancellation(p, backend, best * (1.0 + REFINE_TOL) + REFINE_TOL)
        if refined is not None:
            Khat = refined

    P = np.atleast_2d(P_var.value)
    P = 0.5 * (P + P.T)
    Y = np.atleast_2d(Y_var.value)
    eps = float(eps_var.value)
    lmi = assemble_lmi(p, P, Y, eps)
    scale = max(1.0, float(np.max(np.abs(lmi.M))))
    status = (
        SolverStatus.OPTIMAL_INACCURATE
        if SolverStatus.OPTIMAL_INACCURATE in statuses
        else SolverStatus.OPTIMAL
    )
    if lmi.min_eig < -LMI_FEASTOL * scale:
        if status is SolverStatus.OPTIMAL_INACCURATE:
            raise SynthesisInfeasibleError(
                f"Inaccurate solution violates the robust LMI (min eigenvalue {lmi.min_eig:.3e})",
                status=status.value,
                delta_norm=p.delta_norm,
            )
        logger.warning("Robust LMI min eigenvalue %.3e below feasibility tolerance", lmi.min_eig)

    Kbar = solve(P, Y.T, assume_a="pos").T
    residual = p.Ahat + p.input_gain @ Khat
    cancellation_norm = float(np.linalg.norm(residual, 2))
    objective = cancellation_norm + p.alpha * float(np.linalg.norm(P, 2))
    logger.debug(
        "Synthesis done: |residual|=%.3e |P|=%.4f eps=%.3e lmi_min_eig=%.3e",
        cancellation_norm,
        float(np.linalg.norm(P, 2)),
        eps,
        lmi.min_eig,
    )
    return SynthesisResult(
        P=P,
        Y=Y,
        eps=eps,
        Kbar=Kbar,
        Khat=Khat,
        residual=residual,
        objective=objective,
        cancellation_norm=cancellation_norm,
        status=status,
        solver=backend.name,
        iterations=iterations,
        lmi_min_eig=lmi.min_eig,
        nonlinear=p.nonlinear,
    )


def least_squares_cancellation(p: SynthesisProblem) -> np.ndarray:
    """Khat = -(Xhat1 U0dag)^+ Ahat, a minimizer of both the spectral and the Frobenius residual."""
    return -lstsq(p.input_gain, p.Ahat)[0]


def closed_loop_matrices(r: SynthesisResult, p: SynthesisProblem) -> tuple[np.ndarray, np.ndarray]:
    """(Psi0, Xi0) = (Abar + Xhat1 U0dag Kbar, Ahat + Xhat1 U0dag Khat)."""
    return p.Abar + p.input_gain @ r.Kbar, p.Ahat + p.input_gain @ r.Khat


def spectral_radius(M: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def nominal_closed_loop(r: SynthesisResult, p: SynthesisProblem, x) -> np.ndarray:
    """(Abar + Xhat1 U0dag Kbar) x + (Ahat + Xhat1 U0dag Khat) k̂(x), for a vector or column-stacked points."""
    if p.nonlinear is None:
        raise InputError("The synthesis problem carries no nonlinear feature map")
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = pts[:, None] if single else pts
    if pts.shape[0] != p.n:
        raise InputError(f"x has dimension {pts.shape[0]}, expected {p.n}")
    Psi0, Xi0 = closed_loop_matrices(r, p)
    out = Psi0 @ pts + Xi0 @ p.nonlinear.batch(pts)
    return out[:, 0] if single else out
