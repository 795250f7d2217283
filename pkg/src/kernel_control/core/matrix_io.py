from __future__ import annotations

from typing import Any

import numpy as np


def matrix_payload(matrix: np.ndarray) -> dict[str, Any]:
    """Row-major JSON form of a matrix with explicit dims."""
    arr = np.atleast_2d(np.asarray(matrix, dtype=float))
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "data": [float(v) for v in arr.ravel(order="C")],
    }


def matrix_from_payload(payload: dict[str, Any]) -> np.ndarray:
    rows, cols = int(payload["rows"]), int(payload["cols"])
    data = np.asarray(payload["data"], dtype=float)
    if data.size != rows * cols:
        raise ValueError(
            f"Matrix payload holds {data.size} values, expected {rows}x{cols}"
        )
    return data.reshape((rows, cols), order="C")


def format_matrix_csv(matrix: np.ndarray, precision: int = 17) -> str:
    arr = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = [",".join(f"{v:.{precision}g}" for v in row) for row in arr]
    return "\n".join(lines) + "\n"


def parse_matrix_csv(text: str) -> np.ndarray:
    rows = [
        [float(cell) for cell in line.split(",")]
        for line in text.strip().splitlines()
        if line.strip()
    ]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"Ragged CSV matrix: row widths {sorted(widths)}")
    return np.asarray(rows, dtype=float)
