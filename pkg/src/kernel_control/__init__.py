from .core.errors import (
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
from .interp import ErrorBound, InterpModel, fit
from .kernels import KernelSpec
from .synthesis import SynthesisResult, synthesize

__all__ = [
    "ConfigError",
    "ErrorBound",
    "ExcitationError",
    "InputError",
    "InterpModel",
    "KernelControlError",
    "KernelSpec",
    "NumericalConsistencyError",
    "SingularGramError",
    "SolverBackendError",
    "SynthesisInfeasibleError",
    "SynthesisResult",
    "UnknownFixtureError",
    "fit",
    "synthesize",
]
