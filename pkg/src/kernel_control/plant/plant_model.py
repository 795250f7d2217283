from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..core.errors import InputError, UnknownFixtureError

DriftMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class PlantModel:
    """x+ = f(x) + B u. The drift maps column-stacked states (n x N) to n x N."""

    drift: DriftMap
    input_matrix: np.ndarray
    name: str = "custom"

    def __post_init__(self) -> None:
        B = np.atleast_2d(np.asarray(self.input_matrix, dtype=float))
        B.setflags(write=False)
        object.__setattr__(self, "input_matrix", B)
        origin = np.asarray(self.drift(np.zeros((self.n, 1))), dtype=float)
        if origin.shape != (self.n, 1):
            raise InputError(f"Drift returned shape {origin.shape} for an ({self.n}, 1) input")
        if np.any(np.abs(origin) > 1e-12):
            raise InputError(f"The origin must be an equilibrium, f(0) = {origin.ravel().tolist()}")

    @property
    def n(self) -> int:
        return self.input_matrix.shape[0]

    @property
    def m(self) -> int:
        return self.input_matrix.shape[1]


def _example_drift(X: np.ndarray) -> np.ndarray:
    x1, x2 = X[0], X[1]
    return np.vstack([x2 + x1**3, 0.5 * x1 + 0.2 * x2**2])


def example_plant() -> PlantModel:
    """x1+ = x2 + x1^3 + u, x2+ = 0.5 x1 + 0.2 x2^2."""
    return PlantModel(drift=_example_drift, input_matrix=np.array([[1.0], [0.0]]), name="paper-sec4")


BUILTIN_PLANTS: dict[str, Callable[[], PlantModel]] = {
    "paper-sec4": example_plant,
}


def builtin_plant(name: str) -> PlantModel:
    try:
        return BUILTIN_PLANTS[name]()
    except KeyError as exc:
        raise UnknownFixtureError(
            f"Unknown plant '{name}'. Must be one of: {sorted(BUILTIN_PLANTS)}"
        ) from exc


def step_batch(p: PlantModel, X: np.ndarray, U: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if X.shape[0] != p.n or U.shape[0] != p.m or X.shape[1] != U.shape[1]:
        raise InputError(
            f"step expects states ({p.n}, N) and inputs ({p.m}, N), got {X.shape} and {U.shape}"
        )
    return p.drift(X) + p.input_matrix @ U


def step(p: PlantModel, x, u) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    u = np.asarray(u, dtype=float).ravel()
    if x.size != p.n or u.size != p.m:
        raise InputError(f"step expects x of size {p.n} and u of size {p.m}, got {x.size} and {u.size}")
    return step_batch(p, x[:, None], u[:, None])[:, 0]
