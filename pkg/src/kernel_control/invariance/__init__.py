from .certificate import (
    DEFAULT_RESOLUTION,
    GammaSearch,
    GridEvaluation,
    GridSpec,
    PiCertificate,
    Refinement,
    certify_pi,
    evaluate_grid,
    find_largest_gamma,
    grid_csv,
    refine_marginal,
    sample_pi,
)
from .diagnostics import delta_growth_ratio
from .lyapunov import LyapunovCert, lyapunov_value, lyapunov_values, sample_sublevel_set
from .residuals import (
    ResidualEvaluator,
    decrease_bound,
    decrease_bound_batch,
    membership_X,
    residual_evaluator,
    residual_g,
    residual_g_batch,
    residual_l,
    residual_l_batch,
)
from .simulation import Trajectory, control_input, simulate_closed_loop, simulate_many

__all__ = [
    "DEFAULT_RESOLUTION",
    "GammaSearch",
    "GridEvaluation",
    "GridSpec",
    "LyapunovCert",
    "PiCertificate",
    "Refinement",
    "ResidualEvaluator",
    "Trajectory",
    "certify_pi",
    "control_input",
    "decrease_bound",
    "decrease_bound_batch",
    "delta_growth_ratio",
    "evaluate_grid",
    "find_largest_gamma",
    "grid_csv",
    "lyapunov_value",
    "lyapunov_values",
    "membership_X",
    "refine_marginal",
    "residual_evaluator",
    "residual_g",
    "residual_g_batch",
    "residual_l",
    "residual_l_batch",
    "sample_pi",
    "sample_sublevel_set",
    "simulate_closed_loop",
    "simulate_many",
]
