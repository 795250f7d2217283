class KernelControlError(Exception):
    """Base class for every error raised by kernel_control."""


class InputError(KernelControlError, ValueError):
    """Malformed arguments: wrong dimensions, negative regularization, bad index."""


class SingularGramError(KernelControlError, ArithmeticError):
    """The regularized Gram matrix is not positive definite."""


class NumericalConsistencyError(KernelControlError, ArithmeticError):
    """A quantity that is nonnegative in exact arithmetic came out clearly negative."""


class ExcitationError(KernelControlError, ValueError):
    """The input data matrix U0 does not have full row rank."""


class SynthesisInfeasibleError(KernelControlError, RuntimeError):
    def __init__(self, message: str, status: str, delta_norm: float | None = None) -> None:
        super().__init__(message)
        self.status = status
        self.delta_norm = delta_norm


class SolverBackendError(KernelControlError, RuntimeError):
    def __init__(self, message: str, status: str | None = None) -> None:
        super().__init__(message)
        self.status = status


class UnknownFixtureError(KernelControlError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown fixture"


class ConfigError(KernelControlError, ValueError):
    """Invalid pipeline configuration."""
