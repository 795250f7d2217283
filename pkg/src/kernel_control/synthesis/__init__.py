from .lmi import LmiBlock, assemble_lmi, lmi_expression, schur_reduced_lmi, spectral_epigraph
from .problem import SynthesisProblem, build_problem, delta_matrix, right_inverse, uncertainty_bound
from .program import (
    DEFAULT_LMI_MARGIN,
    closed_loop_matrices,
    least_squares_cancellation,
    nominal_closed_loop,
    spectral_radius,
    synthesize,
)
from .result import SynthesisResult
from .robustness import (
    RobustnessReport,
    petersen_check,
    robust_condition_matrix,
    sample_contractions,
    verify_robust_condition,
)
from .sdp_backend import DEFAULT_SOLVER, CvxpyBackend, SdpBackend, SolveOutcome

__all__ = [
    "DEFAULT_LMI_MARGIN",
    "DEFAULT_SOLVER",
    "CvxpyBackend",
    "LmiBlock",
    "RobustnessReport",
    "SdpBackend",
    "SolveOutcome",
    "SynthesisProblem",
    "SynthesisResult",
    "assemble_lmi",
    "build_problem",
    "closed_loop_matrices",
    "delta_matrix",
    "least_squares_cancellation",
    "lmi_expression",
    "nominal_closed_loop",
    "petersen_check",
    "right_inverse",
    "robust_condition_matrix",
    "sample_contractions",
    "schur_reduced_lmi",
    "spectral_epigraph",
    "spectral_radius",
    "synthesize",
    "uncertainty_bound",
    "verify_robust_condition",
]
