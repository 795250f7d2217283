from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve

from ..core.errors import InputError
from .problem import SynthesisProblem
from .result import SynthesisResult

ROBUST_TOL = 1e-7
PETERSEN_REL_TOL = 1e-9
BOUNDARY_FRACTION = 0.25


@dataclass(frozen=True)
class RobustnessReport:
    """Outcome of a sampled check. Draws D = Delta W with |W|_2 <= 1 cover every D with
    D D^T <= Delta Delta^T; that set equals D D^T <= Delta^2 only when Delta is diagonal.
    `tol` is the largest tolerance applied to any draw."""

    num_samples: int
    max_eig: float
    violations: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def sample_contractions(rng: np.random.Generator, rows: int, cols: int, count: int) -> np.ndarray:
    """count random rows x cols matrices W with |W|_2 <= 1; a quarter sit on the boundary."""
    W = rng.standard_normal((count, rows, cols))
    norms = np.linalg.norm(W, ord=2, axis=(1, 2))
    norms = np.where(norms > 0, norms, 1.0)
    radius = rng.random(count)
    radius[: int(np.ceil(BOUNDARY_FRACTION * count))] = 1.0
    return W * (radius / norms)[:, None, None]


def robust_condition_matrix(r: SynthesisResult, p: SynthesisProblem, D: np.ndarray) -> np.ndarray:
    """(Abar P + (Xhat1 - D) U0dag Y)^T P^-1 (...) - P + Q."""
    G = p.Abar @ r.P + (p.Xhat1 - D) @ p.U0dag @ r.Y
    M = G.T @ solve(r.P, G, assume_a="pos") - r.P + p.Q
    return 0.5 * (M + M.T)


def verify_robust_condition(
    r: SynthesisResult, p: SynthesisProblem, num_samples: int, rng_seed: int | None = 0, *, tol: float = ROBUST_TOL
) -> RobustnessReport:
    """Sample D = Delta W with |W|_2 <= 1 (so D D^T <= Delta Delta^T) and test the quadratic inequality."""
    if num_samples < 1:
        raise InputError(f"num_samples must be >= 1, got {num_samples}")
    if not np.any(p.Delta):
        draws = np.zeros((1, p.n, p.Tbar))
    else:
        rng = np.random.default_rng(rng_seed)
        draws = p.Delta[None, :, :] @ sample_contractions(rng, p.n, p.Tbar, num_samples)
    worst = -np.inf
    violations = 0
    for D in draws:
        top = float(np.linalg.eigvalsh(robust_condition_matrix(r, p, D))[-1])
        worst = max(worst, top)
        violations += top > tol
    return RobustnessReport(num_samples=len(draws), max_eig=worst, violations=violations, tol=tol)


def petersen_check(
    E, F, Delta, eps: float, num_samples: int, rng_seed: int | None = 0, *, samples=None
) -> RobustnessReport:
    """E D^T F + F^T D E^T <= eps^-1 E E^T + eps F^T Delta Delta^T F for random D D^T <= Delta Delta^T."""
    if eps <= 0:
        raise InputError(f"eps must be > 0, got {eps}")
    E = np.atleast_2d(np.asarray(E, dtype=float))
    F = np.atleast_2d(np.asarray(F, dtype=float))
    Delta = np.atleast_2d(np.asarray(Delta, dtype=float))
    if F.shape[1] != E.shape[0] or Delta.shape[0] != F.shape[0]:
        raise InputError(f"Incompatible shapes E {E.shape}, F {F.shape}, Delta {Delta.shape}")
    rng = np.random.default_rng(rng_seed)
    bound = E @ E.T / eps + eps * F.T @ Delta @ Delta.T @ F
    if samples is not None:
        draws = np.asarray(samples, dtype=float).reshape(-1, Delta.shape[0], E.shape[1])
    else:
        draws = Delta[None, :, :] @ sample_contractions(rng, Delta.shape[1], E.shape[1], num_samples)
    worst = -np.inf
    violations = 0
    applied = PETERSEN_REL_TOL
    for D in draws:
        cross = E @ D.T @ F
        lhs = cross + cross.T
        top = float(np.linalg.eigvalsh(lhs - bound)[-1])
        tol = PETERSEN_REL_TOL * max(1.0, np.linalg.norm(lhs, 2) + np.linalg.norm(bound, 2))
        applied = max(applied, tol)
        worst = max(worst, top)
        violations += top > tol
    return RobustnessReport(num_samples=len(draws), max_eig=worst, violations=violations, tol=applied)
