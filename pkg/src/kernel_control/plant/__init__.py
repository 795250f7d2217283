from .dataset_io import load_drift_dataset, load_forced_dataset, save_drift_dataset, save_forced_dataset
from .experiments import (
    ExcitationReport,
    ExperimentConfig,
    ForcedDataset,
    check_excitation,
    collect_drift_data,
    collect_forced_data,
    data_residual,
    forced_dataset,
)
from .fixtures import FixtureConstants, available_fixtures, load_fixture
from .plant_model import PlantModel, builtin_plant, example_plant, step, step_batch

__all__ = [
    "ExcitationReport",
    "ExperimentConfig",
    "FixtureConstants",
    "ForcedDataset",
    "PlantModel",
    "available_fixtures",
    "builtin_plant",
    "check_excitation",
    "collect_drift_data",
    "collect_forced_data",
    "data_residual",
    "forced_dataset",
    "load_drift_dataset",
    "load_fixture",
    "load_forced_dataset",
    "example_plant",
    "save_drift_dataset",
    "save_forced_dataset",
    "step",
    "step_batch",
]
