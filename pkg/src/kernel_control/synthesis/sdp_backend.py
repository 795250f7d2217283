from abc import ABC, abstractmethod
from dataclasses import dataclass

import cvxpy as cp

from ..core.enums import SolverStatus
from ..core.errors import SolverBackendError

DEFAULT_SOLVER = "CLARABEL"

_STATUS_MAP = {
    cp.OPTIMAL: SolverStatus.OPTIMAL,
    cp.OPTIMAL_INACCURATE: SolverStatus.OPTIMAL_INACCURATE,
    cp.INFEASIBLE: SolverStatus.INFEASIBLE,
    cp.INFEASIBLE_INACCURATE: SolverStatus.INFEASIBLE,
}


@dataclass(frozen=True)
class SolveOutcome:
    status: SolverStatus
    value: float | None
    solver: str
    raw_status: str
    iterations: int | None = None
    solve_time: float | None = None


class SdpBackend(ABC):
    """Abstract interface for conic optimization backends."""

    @property
    @abstractmethod
    def name(self) -> str:
        raise NotImplementedError

    @abstractmethod
    def solve(self, problem: cp.Problem) -> SolveOutcome:
        """Solve a problem built from affine matrix constraints and report its status."""
        raise NotImplementedError


class CvxpyBackend(SdpBackend):
    def __init__(self, solver: str = DEFAULT_SOLVER, verbose: bool = False, **options) -> None:
        solver = solver.upper()
        if solver not in cp.installed_solvers():
            raise SolverBackendError(
                f"Solver '{solver}' is not installed. Available: {sorted(cp.installed_solvers())}"
            )
        self.solver = solver
        self.verbose = verbose
        self.options = options

    @property
    def name(self) -> str:
        return self.solver

    def solve(self, problem: cp.Problem) -> SolveOutcome:
        try:
            problem.solve(solver=self.solver, verbose=self.verbose, **self.options)
        except cp.error.SolverError as exc:
            raise SolverBackendError(f"Solver {self.solver} failed: {exc}") from exc
        raw = str(problem.status)
        status = _STATUS_MAP.get(raw, SolverStatus.FAILED)
        stats = problem.solver_stats
        return SolveOutcome(
            status=status,
            value=None if problem.value is None else float(problem.value),
            solver=self.solver,
            raw_status=raw,
            iterations=getattr(stats, "num_iters", None),
            solve_time=getattr(stats, "solve_time", None),
        )
