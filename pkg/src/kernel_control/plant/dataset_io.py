from __future__ import annotations

import json
from typing import Any

from ..core.errors import InputError
from ..core.matrix_io import format_matrix_csv, parse_matrix_csv
from ..files import ArtifactStorage
from ..interp import DriftDataset
from .experiments import ForcedDataset

MANIFEST_NAME = "manifest.json"


def _save(storage: ArtifactStorage, prefix: str, kind: str, matrices: dict, extra: dict[str, Any]) -> list[str]:
    saved = []
    for key, value in matrices.items():
        saved.append(storage.save_text(storage.build_path(prefix, f"{key}.csv"), format_matrix_csv(value)))
    manifest = {
        "kind": kind,
        "dims": {key: list(value.shape) for key, value in matrices.items()},
        **extra,
    }
    saved.append(
        storage.save_text(
            storage.build_path(prefix, MANIFEST_NAME),
            json.dumps(manifest, indent=2, sort_keys=True) + "\n",
        )
    )
    return saved


def _load(storage: ArtifactStorage, prefix: str, kind: str) -> tuple[dict, dict[str, Any]]:
    manifest = json.loads(storage.read_text(storage.build_path(prefix, MANIFEST_NAME)))
    if manifest.get("kind") != kind:
        raise InputError(f"Dataset at '{prefix}' is a {manifest.get('kind')!r} dataset, expected {kind!r}")
    matrices = {}
    for key, dims in manifest["dims"].items():
        value = parse_matrix_csv(storage.read_text(storage.build_path(prefix, f"{key}.csv")))
        if list(value.shape) != list(dims):
            raise InputError(f"{key}.csv holds a {value.shape} matrix, the manifest says {tuple(dims)}")
        matrices[key] = value
    return matrices, manifest


def save_drift_dataset(
    storage: ArtifactStorage, prefix: str, data: DriftDataset, *, seed: int | None = None, kernel_id: str | None = None
) -> list[str]:
    return _save(
        storage, prefix, "drift", {"X0": data.X0, "X1": data.X1}, {"seed": seed, "kernel_id": kernel_id}
    )


def load_drift_dataset(storage: ArtifactStorage, prefix: str) -> tuple[DriftDataset, dict[str, Any]]:
    matrices, manifest = _load(storage, prefix, "drift")
    return DriftDataset(X0=matrices["X0"], X1=matrices["X1"]), manifest


def save_forced_dataset(
    storage: ArtifactStorage, prefix: str, data: ForcedDataset, *, seed: int | None = None, kernel_id: str | None = None
) -> list[str]:
    matrices = {"Xbar0": data.Xbar0, "Xbar1": data.Xbar1, "U0": data.U0, "K0": data.K0}
    return _save(storage, prefix, "forced", matrices, {"seed": seed, "kernel_id": kernel_id})


def load_forced_dataset(storage: ArtifactStorage, prefix: str) -> tuple[ForcedDataset, dict[str, Any]]:
    matrices, manifest = _load(storage, prefix, "forced")
    return ForcedDataset(**matrices), manifest
