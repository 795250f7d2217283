from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky

from ..core.errors import InputError, NumericalConsistencyError, SingularGramError
from ..kernels import CenterSet, GramMatrix, KernelSpec, gram_matrix, kernel_vectors, rkhs_norm_sq

logger = logging.getLogger(__name__)

RADICAND_TOLERANCE = 1e-9
FIT_RESIDUAL_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class DriftDataset:
    """Drift-only experiment: X1[:, k] = f(X0[:, k])."""

    X0: np.ndarray
    X1: np.ndarray

    def __post_init__(self) -> None:
        X0 = np.atleast_2d(np.asarray(self.X0, dtype=float))
        X1 = np.atleast_2d(np.asarray(self.X1, dtype=float))
        if X0.shape != X1.shape:
            raise InputError(f"X0 {X0.shape} and X1 {X1.shape} must have the same shape")
        object.__setattr__(self, "X0", X0)
        object.__setattr__(self, "X1", X1)

    @property
    def n(self) -> int:
        return self.X0.shape[0]

    @property
    def T(self) -> int:
        return self.X0.shape[1]


@dataclass(frozen=True, eq=False)
class InterpModel:
    """s_f(x) = A k(x) with A = X1 (lambda I + K_X0)^-1.

    reg_gram is the Cholesky factorization of (lambda I + K); power_core is the
    lower Cholesky factor L of (2 lambda I + K). With z = (lambda I + K)^-1 k(x),
    k(x)^T K̂^-1 k(x) = |L^T z|^2 since K̂^-1 = R^-1 (2 lambda I + K) R^-1.
    """

    kernel: KernelSpec
    centers: CenterSet
    lam: float
    A: np.ndarray
    gram: GramMatrix
    reg_gram: tuple[np.ndarray, bool] = field(repr=False)
    power_core: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def T(self) -> int:
        return self.A.shape[1]

    def fit_residual(self, X1: np.ndarray) -> float:
        reg = self.gram.entries + self.lam * np.eye(self.T)
        return float(np.linalg.norm(self.A @ reg - X1) / max(np.linalg.norm(X1), 1e-300))


@dataclass(frozen=True, eq=False)
class ErrorBound:
    """delta(x) = |Gamma| * power_function(x) with user-supplied Gamma_i >= ||f_i||_H."""

    gamma: np.ndarray
    model: InterpModel

    def __post_init__(self) -> None:
        gamma = np.asarray(self.gamma, dtype=float).ravel()
        if gamma.size != self.model.n:
            raise InputError(f"Gamma has {gamma.size} entries, the model state dimension is {self.model.n}")
        if np.any(gamma < 0) or not np.all(np.isfinite(gamma)):
            raise InputError(f"Gamma entries must be finite and >= 0, got {gamma.tolist()}")
        object.__setattr__(self, "gamma", gamma)

    @property
    def gamma_norm(self) -> float:
        return float(np.linalg.norm(self.gamma))


def fit(data: DriftDataset, k: KernelSpec, lam: float, domain_box=None) -> InterpModel:
    if not np.isfinite(lam) or lam < 0:
        raise InputError(f"Regularization lambda must be >= 0, got {lam}")
    centers = CenterSet(data.X0, domain_box=domain_box)
    gram = gram_matrix(k, centers)
    T = centers.size
    if lam == 0 and not gram.is_positive_definite:
        raise SingularGramError(
            f"lambda = 0 needs a positive definite Gram matrix (min eigenvalue {gram.min_eig:.3e})"
        )
    try:
        reg_gram = cho_factor(gram.entries + lam * np.eye(T), lower=True)
        power_core = cholesky(gram.entries + 2.0 * lam * np.eye(T), lower=True)
    except LinAlgError as exc:
        raise SingularGramError(
            f"lambda I + K is not positive definite (lambda={lam}, min eigenvalue {gram.min_eig:.3e})"
        ) from exc

    A = cho_solve(reg_gram, data.X1.T).T
    A.setflags(write=False)
    model = InterpModel(
        kernel=k,
        centers=centers,
        lam=float(lam),
        A=A,
        gram=gram,
        reg_gram=reg_gram,
        power_core=power_core,
    )
    residual = model.fit_residual(data.X1)
    if residual > FIT_RESIDUAL_TOLERANCE:
        logger.warning("Interpolation residual %.3e exceeds %.0e", residual, FIT_RESIDUAL_TOLERANCE)
    logger.debug("Fitted %s with T=%d, lambda=%g, residual=%.3e", k.kernel_id, T, lam, residual)
    return model


def _points(m: InterpModel, x) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] != m.centers.n:
        raise InputError(f"x has dimension {pts.shape[0]}, the model expects {m.centers.n}")
    return pts


def predict_batch(m: InterpModel, points: np.ndarray) -> np.ndarray:
    return m.A @ kernel_vectors(m.kernel, _points(m, points), m.centers)


def predict(m: InterpModel, x) -> np.ndarray:
    return predict_batch(m, _points(m, x))[:, 0]


def power_radicand_batch(m: InterpModel, points: np.ndarray) -> np.ndarray:
    pts = _points(m, points)
    kx = kernel_vectors(m.kernel, pts, m.centers)
    z = cho_solve(m.reg_gram, kx)
    w = m.power_core.T @ z
    return m.kernel.diag(pts) - np.sum(w * w, axis=0)


def power_function_batch(m: InterpModel, points: np.ndarray) -> np.ndarray:
    pts = _points(m, points)
    radicand = power_radicand_batch(m, pts)
    floor = -RADICAND_TOLERANCE * (1.0 + m.kernel.diag(pts))
    bad = np.flatnonzero(radicand < floor)
    if bad.size:
        i = int(bad[0])
        raise NumericalConsistencyError(
            f"Power-function radicand {radicand[i]:.3e} at x={pts[:, i].tolist()} is below {floor[i]:.3e}"
        )
    return np.sqrt(np.maximum(radicand, 0.0))


def power_function(m: InterpModel, x) -> float:
    return float(power_function_batch(m, _points(m, x))[0])


def delta_batch(b: ErrorBound, points: np.ndarray) -> np.ndarray:
    return b.gamma_norm * power_function_batch(b.model, points)


def delta(b: ErrorBound, x) -> float:
    return float(delta_batch(b, _points(b.model, x))[0])


def regularized_cost(m: InterpModel, data: DriftDataset, row: int) -> float:
    """sum_k |X1[row, k] - s_f(X0[:, k])[row]|^2 + lambda ||row of A k(.)||_H^2 (row is 0-based)."""
    if not 0 <= row < m.n:
        raise InputError(f"row {row} out of range for a {m.n}-dimensional model")
    fitted = m.A[row] @ m.gram.entries
    misfit = float(np.sum((data.X1[row] - fitted) ** 2))
    return misfit + m.lam * rkhs_norm_sq(m.A[row], m.gram)


def cost_with_coefficients(m: InterpModel, data: DriftDataset, row: int, alpha: np.ndarray) -> float:
    """Regularized cost of the candidate s(x) = alpha k(x) for one output row."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    misfit = float(np.sum((data.X1[row] - alpha @ m.gram.entries) ** 2))
    return misfit + m.lam * float(alpha @ m.gram.entries @ alpha)
