from enum import Enum


class KernelFamily(str, Enum):
    POLYNOMIAL_SUM = "polynomial-sum"
    GAUSSIAN = "gaussian"


class ExperimentMode(str, Enum):
    DRIFT_ONLY = "drift-only"
    FORCED = "forced"


class Verdict(str, Enum):
    CERTIFIED = "certified"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    OPTIMAL_INACCURATE = "optimal_inaccurate"
    INFEASIBLE = "infeasible"
    FAILED = "failed"
