from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..core.enums import ExperimentMode
from ..core.errors import InputError
from ..interp import DriftDataset, InterpModel
from ..kernels import CenterSet, KernelSpec, as_box, kernel_vectors
from .plant_model import PlantModel, step_batch

logger = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class ExperimentConfig:
    num_samples: int
    state_box: tuple[tuple[float, float], ...]
    input_box: tuple[tuple[float, float], ...] = ()
    seed: int = 0
    mode: ExperimentMode = ExperimentMode.DRIFT_ONLY
    trajectory: bool = False

    def __post_init__(self) -> None:
        if int(self.num_samples) < 1:
            raise InputError(f"num_samples must be >= 1, got {self.num_samples}")
        if int(self.seed) < 0:
            raise InputError(f"seed must be unsigned, got {self.seed}")
        object.__setattr__(self, "mode", ExperimentMode(self.mode))
        object.__setattr__(self, "state_box", as_box(self.state_box))
        object.__setattr__(self, "input_box", as_box(self.input_box))
        if self.mode is ExperimentMode.FORCED and not self.input_box:
            raise InputError("A forced experiment needs an input box")


@dataclass(frozen=True, eq=False)
class ForcedDataset:
    """Second experiment: Xbar1 = f(Xbar0) + B U0, K0[:, k] = k(Xbar0[:, k])."""

    Xbar0: np.ndarray
    Xbar1: np.ndarray
    U0: np.ndarray
    K0: np.ndarray

    def __post_init__(self) -> None:
        Xbar0 = np.atleast_2d(np.asarray(self.Xbar0, dtype=float))
        Xbar1 = np.atleast_2d(np.asarray(self.Xbar1, dtype=float))
        U0 = np.atleast_2d(np.asarray(self.U0, dtype=float))
        K0 = np.atleast_2d(np.asarray(self.K0, dtype=float))
        Tbar = Xbar0.shape[1]
        if Xbar1.shape != Xbar0.shape or U0.shape[1] != Tbar or K0.shape[1] != Tbar:
            raise InputError(
                f"Inconsistent forced dataset shapes: Xbar0 {Xbar0.shape}, Xbar1 {Xbar1.shape}, "
                f"U0 {U0.shape}, K0 {K0.shape}"
            )
        for name, value in (("Xbar0", Xbar0), ("Xbar1", Xbar1), ("U0", U0), ("K0", K0)):
            object.__setattr__(self, name, value)

    @property
    def Tbar(self) -> int:
        return self.Xbar0.shape[1]

    @property
    def m(self) -> int:
        return self.U0.shape[0]


@dataclass(frozen=True)
class ExcitationReport:
    ok: bool
    sigma_min: float
    sigma_max: float
    tol: float

    def __bool__(self) -> bool:
        return self.ok


def _uniform(rng: np.random.Generator, box, count: int) -> np.ndarray:
    lo = np.array([b[0] for b in box])[:, None]
    hi = np.array([b[1] for b in box])[:, None]
    return lo + (hi - lo) * rng.random((len(box), count))


def _states(p: PlantModel, c: ExperimentConfig, rng: np.random.Generator, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(c.state_box) != p.n:
        raise InputError(f"state_box has {len(c.state_box)} intervals for an n={p.n} plant")
    if not c.trajectory:
        X0 = _uniform(rng, c.state_box, c.num_samples)
        return X0, step_batch(p, X0, U)
    states = np.empty((p.n, c.num_samples + 1))
    states[:, 0] = _uniform(rng, c.state_box, 1)[:, 0]
    for k in range(c.num_samples):
        states[:, k + 1] = step_batch(p, states[:, k : k + 1], U[:, k : k + 1])[:, 0]
    return states[:, :-1], states[:, 1:]


def collect_drift_data(p: PlantModel, c: ExperimentConfig) -> DriftDataset:
    if c.mode is not ExperimentMode.DRIFT_ONLY:
        raise InputError(f"collect_drift_data needs mode={ExperimentMode.DRIFT_ONLY.value}, got {c.mode.value}")
    rng = np.random.default_rng(c.seed)
    X0, X1 = _states(p, c, rng, np.zeros((p.m, c.num_samples)))
    logger.debug("Collected %d drift samples (trajectory=%s, seed=%d)", c.num_samples, c.trajectory, c.seed)
    return DriftDataset(X0=X0, X1=X1)


def forced_dataset(Xbar0, Xbar1, U0, kernel: KernelSpec, centers: CenterSet) -> ForcedDataset:
    Xbar0 = np.atleast_2d(np.asarray(Xbar0, dtype=float))
    return ForcedDataset(
        Xbar0=Xbar0,
        Xbar1=Xbar1,
        U0=U0,
        K0=kernel_vectors(kernel, Xbar0, centers),
    )


def collect_forced_data(p: PlantModel, c: ExperimentConfig, m: InterpModel) -> ForcedDataset:
    if c.mode is not ExperimentMode.FORCED:
        raise InputError(f"collect_forced_data needs mode={ExperimentMode.FORCED.value}, got {c.mode.value}")
    if len(c.input_box) != p.m:
        raise InputError(f"input_box has {len(c.input_box)} intervals for an m={p.m} plant")
    rng = np.random.default_rng(c.seed)
    U0 = _uniform(rng, c.input_box, c.num_samples)
    Xbar0, Xbar1 = _states(p, c, rng, U0)
    logger.debug("Collected %d forced samples (seed=%d)", c.num_samples, c.seed)
    return forced_dataset(Xbar0, Xbar1, U0, m.kernel, m.centers)


def check_excitation(U0: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> ExcitationReport:
    """Full row rank test: sigma_min(U0) > tol * sigma_max(U0)."""
    U0 = np.atleast_2d(np.asarray(U0, dtype=float))
    m, Tbar = U0.shape
    sv = np.linalg.svd(U0, compute_uv=False)
    sigma_max = float(sv[0]) if sv.size else 0.0
    sigma_min = float(sv[-1]) if m <= Tbar and sv.size else 0.0
    ok = sigma_max > 0.0 and sigma_min > tol * sigma_max
    return ExcitationReport(ok=ok, sigma_min=sigma_min, sigma_max=sigma_max, tol=tol)


def data_residual(d: ForcedDataset, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """D0 = Xbar1 - A K0 - B U0."""
    return d.Xbar1 - A @ d.K0 - np.atleast_2d(B) @ d.U0
