from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..core.errors import InputError
from ..kernels import NonlinearMap
from ..plant import PlantModel, step_batch
from ..synthesis import SynthesisResult

logger = logging.getLogger(__name__)

DIVERGENCE_NORM = 1e12


@dataclass(frozen=True, eq=False)
class Trajectory:
    """states has shape (steps + 1, n, N); diverged runs are NaN after blow-up."""

    states: np.ndarray
    inputs: np.ndarray
    diverged: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def any_diverged(self) -> bool:
        return bool(np.any(self.diverged))


def control_input(r: SynthesisResult, nonlinear: NonlinearMap, X: np.ndarray) -> np.ndarray:
    """u = Kbar x + Khat k̂(x) for column-stacked states."""
    return r.Kbar @ X + r.Khat @ nonlinear.batch(X)


def simulate_many(
    p: PlantModel, r: SynthesisResult, X0, steps: int, *, nonlinear: NonlinearMap | None = None
) -> Trajectory:
    nonlinear = nonlinear or r.nonlinear
    if nonlinear is None:
        raise InputError("Simulation needs the controller's nonlinear feature map")
    if steps < 0:
        raise InputError(f"steps must be >= 0, got {steps}")
    X = np.atleast_2d(np.asarray(X0, dtype=float)).copy()
    if X.shape[0] != p.n:
        raise InputError(f"Initial states have dimension {X.shape[0]}, the plant {p.n}")
    N = X.shape[1]
    states = np.empty((steps + 1, p.n, N))
    inputs = np.full((steps, p.m, N), np.nan)
    states[0] = X
    diverged = np.zeros(N, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            U = control_input(r, nonlinear, X)
            X = step_batch(p, X, U)
            blown = ~np.all(np.isfinite(X), axis=0) | (np.linalg.norm(X, axis=0) > DIVERGENCE_NORM)
            diverged |= blown
            X[:, diverged] = np.nan
            U[:, diverged] = np.nan
            inputs[k] = U
            states[k + 1] = X
    if diverged.any():
        logger.warning("%d of %d closed-loop runs diverged", int(diverged.sum()), N)
    return Trajectory(states=states, inputs=inputs, diverged=diverged)


def simulate_closed_loop(
    p: PlantModel, r: SynthesisResult, x0, steps: int, *, nonlinear: NonlinearMap | None = None
) -> Trajectory:
    """x+ = f(x) + B (Kbar x + Khat k̂(x)) on the true plant from one initial state."""
    x0 = np.asarray(x0, dtype=float).ravel()
    return simulate_many(p, r, x0[:, None], steps, nonlinear=nonlinear)
