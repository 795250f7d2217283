from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..core.errors import UnknownFixtureError
from ..core.matrix_io import parse_matrix_csv
from ..interp import DriftDataset
from ..kernels import Box, CenterSet, KernelSpec, as_box
from .experiments import ForcedDataset, forced_dataset
from .plant_model import PlantModel, builtin_plant

logger = logging.getLogger(__name__)

FIXTURE_PACKAGE = "kernel_control.plant"
FIXTURE_DIR = "fixture_data"
MATRIX_FILES = ("X0", "Xbar0", "Xbar1", "U0")


@dataclass(frozen=True, eq=False)
class FixtureConstants:
    name: str
    plant: PlantModel
    kernel: KernelSpec
    lam: float
    gamma: np.ndarray
    Q: np.ndarray
    alpha: float
    B: np.ndarray
    state_box: Box
    input_box: Box
    domain_box: Box
    reference_P: np.ndarray
    reference_gamma: float
    nominal_first_row_gain: float


def _fixture_root(directory: str | Path | None):
    if directory is not None:
        return Path(directory)
    return resources.files(FIXTURE_PACKAGE).joinpath(FIXTURE_DIR)


def available_fixtures(directory: str | Path | None = None) -> list[str]:
    root = _fixture_root(directory)
    if not root.is_dir():
        return []
    return sorted(entry.name for entry in root.iterdir() if entry.is_dir())


def _constants(name: str, raw: dict) -> FixtureConstants:
    return FixtureConstants(
        name=name,
        plant=builtin_plant(raw["plant"]),
        kernel=KernelSpec.from_dict(raw["kernel"]),
        lam=float(raw["lambda"]),
        gamma=np.asarray(raw["gamma"], dtype=float),
        Q=np.asarray(raw["Q"], dtype=float),
        alpha=float(raw["alpha"]),
        B=np.asarray(raw["B"], dtype=float),
        state_box=as_box(raw["state_box"]),
        input_box=as_box(raw["input_box"]),
        domain_box=as_box(raw["domain_box"]),
        reference_P=np.asarray(raw["reference_P"], dtype=float),
        reference_gamma=float(raw["reference_gamma"]),
        nominal_first_row_gain=float(raw["nominal_first_row_gain"]),
    )


def load_fixture(
    name: str, directory: str | Path | None = None
) -> tuple[DriftDataset, ForcedDataset, FixtureConstants]:
    """Printed example matrices plus the constants that go with them.

    X1 is not part of the printed data; it is evaluated from the fixture's
    plant drift at the printed X0.
    """
    folder = _fixture_root(directory).joinpath(name)
    if not folder.is_dir():
        raise UnknownFixtureError(
            f"Unknown fixture '{name}'. Available: {available_fixtures(directory)}"
        )
    matrices = {
        key: parse_matrix_csv(folder.joinpath(f"{key}.csv").read_text(encoding="utf-8"))
        for key in MATRIX_FILES
    }
    constants = _constants(name, json.loads(folder.joinpath("constants.json").read_text(encoding="utf-8")))

    X0 = matrices["X0"]
    drift = DriftDataset(X0=X0, X1=constants.plant.drift(X0))
    centers = CenterSet(X0, domain_box=constants.domain_box)
    forced = forced_dataset(
        matrices["Xbar0"], matrices["Xbar1"], matrices["U0"], constants.kernel, centers
    )
    logger.debug(
        "Loaded fixture %s: T=%d, Tbar=%d, m=%d", name, drift.T, forced.Tbar, forced.m
    )
    return drift, forced, constants
