from .checks import example_checks
from .config import (
    CertifyConfig,
    GammaConfig,
    OutputConfig,
    PipelineConfig,
    SimulateConfig,
    SynthesisConfig,
    config_from_dict,
    config_hash,
    load_config,
    with_overrides,
)
from .gamma import GammaDerivation, derive_gamma_from_monomials
from .pipeline import KernelControlPipeline, RunLoggerAdapter, RunState
from .plotting import render_invariance_svg
from .report import CheckResult, RunReport

__all__ = [
    "CertifyConfig",
    "CheckResult",
    "GammaConfig",
    "GammaDerivation",
    "KernelControlPipeline",
    "OutputConfig",
    "PipelineConfig",
    "RunLoggerAdapter",
    "RunReport",
    "RunState",
    "SimulateConfig",
    "SynthesisConfig",
    "config_from_dict",
    "config_hash",
    "derive_gamma_from_monomials",
    "example_checks",
    "load_config",
    "render_invariance_svg",
    "with_overrides",
]
