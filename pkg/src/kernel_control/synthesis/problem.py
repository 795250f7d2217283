from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve

from ..core.errors import ExcitationError, InputError
from ..interp import ErrorBound, InterpModel, delta_batch, power_function_batch
from ..kernels import NonlinearMap, linear_part
from ..plant import ForcedDataset, check_excitation
from ..plant.experiments import DEFAULT_RANK_TOL

logger = logging.getLogger(__name__)

DELTA_WARN_THRESHOLD = 1.0


@dataclass(frozen=True, eq=False)
class SynthesisProblem:
    """Data of the robust cancellation program.

    Xhat1 = Xbar1 - A K0 and U0dag = U0^T (U0 U0^T)^-1. Delta bounds the
    unknown residual D0 through D0 D0^T <= Delta^2.
    """

    Abar: np.ndarray
    Ahat: np.ndarray
    Xhat1: np.ndarray
    U0: np.ndarray
    U0dag: np.ndarray
    Delta: np.ndarray
    Q: np.ndarray
    alpha: float = 1.0
    nonlinear: NonlinearMap | None = None

    def __post_init__(self) -> None:
        for name in ("Abar", "Ahat", "Xhat1", "U0", "U0dag", "Delta", "Q"):
            value = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        n, m, Tbar = self.n, self.m, self.Tbar
        expected = {
            "Abar": (n, n),
            "Xhat1": (n, Tbar),
            "U0dag": (Tbar, m),
            "Delta": (n, n),
            "Q": (n, n),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise InputError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if self.Ahat.shape[0] != n:
            raise InputError(f"Ahat has {self.Ahat.shape[0]} rows, expected {n}")
        if self.nonlinear is not None and self.nonlinear.size != self.S:
            raise InputError(f"Nonlinear map has {self.nonlinear.size} features, Ahat has {self.S} columns")
        if self.alpha < 0 or not np.isfinite(self.alpha):
            raise InputError(f"alpha must be >= 0, got {self.alpha}")
        if np.max(np.abs(self.Q - self.Q.T)) > 1e-12 * max(1.0, np.max(np.abs(self.Q))):
            raise InputError("Q must be symmetric")
        if np.linalg.eigvalsh(self.Q)[0] <= 0:
            raise InputError(f"Q must be positive definite, eigenvalues {np.linalg.eigvalsh(self.Q).tolist()}")
        if np.any(self.Delta != np.diag(np.diag(self.Delta))) or np.any(np.diag(self.Delta) < 0):
            raise InputError("Delta must be diagonal with nonnegative entries")
        gap = np.max(np.abs(self.U0 @ self.U0dag - np.eye(m)))
        if gap > 1e-10:
            raise InputError(f"U0 U0dag deviates from the identity by {gap:.3e}")

    @classmethod
    def from_matrices(
        cls,
        Abar,
        Ahat,
        Xhat1,
        U0,
        Delta,
        Q,
        alpha: float = 1.0,
        nonlinear: NonlinearMap | None = None,
    ) -> "SynthesisProblem":
        U0 = np.atleast_2d(np.asarray(U0, dtype=float))
        Delta = np.asarray(Delta, dtype=float)
        n = np.atleast_2d(Abar).shape[0]
        if Delta.ndim == 0:
            Delta = float(Delta) * np.eye(n)
        return cls(
            Abar=Abar,
            Ahat=Ahat,
            Xhat1=Xhat1,
            U0=U0,
            U0dag=right_inverse(U0),
            Delta=Delta,
            Q=Q,
            alpha=float(alpha),
            nonlinear=nonlinear,
        )

    @property
    def n(self) -> int:
        return self.Abar.shape[0]

    @property
    def m(self) -> int:
        return self.U0.shape[0]

    @property
    def Tbar(self) -> int:
        return self.U0.shape[1]

    @property
    def S(self) -> int:
        return self.Ahat.shape[1]

    @property
    def input_gain(self) -> np.ndarray:
        """Xhat1 U0dag, the data-based surrogate of B."""
        return self.Xhat1 @ self.U0dag

    @property
    def delta_norm(self) -> float:
        return float(np.max(np.diag(self.Delta))) if self.n else 0.0


def right_inverse(U0: np.ndarray) -> np.ndarray:
    U0 = np.atleast_2d(np.asarray(U0, dtype=float))
    try:
        return solve(U0 @ U0.T, U0, assume_a="pos").T
    except LinAlgError as exc:
        raise ExcitationError(f"U0 U0^T is singular, U0 has shape {U0.shape}") from exc


def uncertainty_bound(deltas, n: int) -> np.ndarray:
    deltas = np.asarray(deltas, dtype=float).ravel()
    if np.any(deltas < 0):
        raise InputError("delta values must be >= 0")
    return float(np.sqrt(np.sum(deltas**2))) * np.eye(n)


def delta_matrix(b: ErrorBound, Xbar0: np.ndarray, *, diagonal: bool = False) -> np.ndarray:
    """Delta = sqrt(sum_k delta(xbar_k)^2) I.

    With diagonal=True (experimental) row i is bounded by Gamma_i alone and
    the n-fold diagonal dominance factor keeps D0 D0^T <= Delta^2.
    """
    n = b.model.n
    if not diagonal:
        return uncertainty_bound(delta_batch(b, Xbar0), n)
    power = float(np.sqrt(np.sum(power_function_batch(b.model, Xbar0) ** 2)))
    return np.diag(np.sqrt(n) * b.gamma * power)


def build_problem(
    m: InterpModel,
    d: ForcedDataset,
    b: ErrorBound,
    Q,
    alpha: float,
    *,
    excitation_tol: float = DEFAULT_RANK_TOL,
    experimental_diagonal_delta: bool = False,
) -> SynthesisProblem:
    report = check_excitation(d.U0, excitation_tol)
    if not report.ok:
        raise ExcitationError(
            f"U0 ({d.m}x{d.Tbar}) is not full row rank: sigma_min={report.sigma_min:.3e}, "
            f"sigma_max={report.sigma_max:.3e}, tol={excitation_tol:g}"
        )
    if d.K0.shape[0] != m.T:
        raise InputError(f"K0 has {d.K0.shape[0]} rows, the model has {m.T} centers")

    Abar, nonlinear = linear_part(m.kernel, m.A, m.centers)
    Delta = delta_matrix(b, d.Xbar0, diagonal=experimental_diagonal_delta)
    problem = SynthesisProblem(
        Abar=Abar,
        Ahat=m.A,
        Xhat1=d.Xbar1 - m.A @ d.K0,
        U0=d.U0,
        U0dag=right_inverse(d.U0),
        Delta=Delta,
        Q=np.asarray(Q, dtype=float),
        alpha=float(alpha),
        nonlinear=nonlinear,
    )
    if problem.delta_norm > DELTA_WARN_THRESHOLD:
        logger.warning(
            "Uncertainty bound |Delta| = %.3e is large; the synthesis program may be infeasible "
            "(consider a smaller lambda or more data)",
            problem.delta_norm,
        )
    logger.debug(
        "Built synthesis problem n=%d m=%d Tbar=%d S=%d |Delta|=%.3e",
        problem.n,
        problem.m,
        problem.Tbar,
        problem.S,
        problem.delta_norm,
    )
    return problem
