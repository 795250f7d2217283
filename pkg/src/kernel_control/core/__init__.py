from .enums import ExperimentMode, KernelFamily, SolverStatus, Verdict
from .errors import (
    ConfigError,
    ExcitationError,
    InputError,
    KernelControlError,
    NumericalConsistencyError,
    SingularGramError,
    SolverBackendError,
    SynthesisInfeasibleError,
    UnknownFixtureError,
)

__all__ = [
    "ConfigError",
    "ExcitationError",
    "ExperimentMode",
    "InputError",
    "KernelControlError",
    "KernelFamily",
    "NumericalConsistencyError",
    "SingularGramError",
    "SolverBackendError",
    "SolverStatus",
    "SynthesisInfeasibleError",
    "UnknownFixtureError",
    "Verdict",
]
