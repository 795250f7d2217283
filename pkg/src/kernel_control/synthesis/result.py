from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..core.enums import SolverStatus
from ..core.matrix_io import matrix_from_payload, matrix_payload
from ..kernels import NonlinearMap

MATRIX_FIELDS = ("P", "Y", "Kbar", "Khat", "residual")


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    """Controller u = Kbar x + Khat k̂(x) with Lyapunov data (P, Y, eps)."""

    P: np.ndarray
    Y: np.ndarray
    eps: float
    Kbar: np.ndarray
    Khat: np.ndarray
    residual: np.ndarray
    objective: float
    cancellation_norm: float
    status: SolverStatus = SolverStatus.OPTIMAL
    solver: str = ""
    iterations: dict[str, int | None] = field(default_factory=dict)
    lmi_min_eig: float | None = None
    nonlinear: NonlinearMap | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def m(self) -> int:
        return self.Kbar.shape[0]

    @property
    def P_norm(self) -> float:
        return float(np.linalg.norm(self.P, 2))

    def payload(self) -> dict[str, Any]:
        out: dict[str, Any] = {name: matrix_payload(getattr(self, name)) for name in MATRIX_FIELDS}
        out.update(
            {
                "eps": self.eps,
                "objective": self.objective,
                "cancellation_norm": self.cancellation_norm,
                "status": self.status.value,
                "solver": self.solver,
                "iterations": dict(self.iterations),
                "lmi_min_eig": self.lmi_min_eig,
            }
        )
        return out

    @classmethod
    def from_payload(cls, payload: dict[str, Any], nonlinear: NonlinearMap | None = None) -> "SynthesisResult":
        matrices = {name: matrix_from_payload(payload[name]) for name in MATRIX_FIELDS}
        return cls(
            **matrices,
            eps=float(payload["eps"]),
            objective=float(payload["objective"]),
            cancellation_norm=float(payload["cancellation_norm"]),
            status=SolverStatus(payload.get("status", SolverStatus.OPTIMAL.value)),
            solver=payload.get("solver", ""),
            iterations=dict(payload.get("iterations", {})),
            lmi_min_eig=payload.get("lmi_min_eig"),
            nonlinear=nonlinear,
        )
