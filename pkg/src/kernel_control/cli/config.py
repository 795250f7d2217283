from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import tomli
from dotenv import load_dotenv

from ..core.enums import ExperimentMode
from ..core.errors import ConfigError, InputError
from ..kernels import Box, KernelSpec, as_box
from ..plant import ExperimentConfig

DEFAULT_FIXTURE = "paper-sec4"
EXAMPLE_STATE_BOX: Box = ((-2.0, 2.0), (-2.0, 2.0))
EXAMPLE_INPUT_BOX: Box = ((-0.5, 0.5),)
EXAMPLE_DOMAIN_BOX: Box = ((-4.0, 4.0), (-4.0, 4.0))

Monomial = tuple[tuple[int, ...], float]

# x1+ = x2 + x1^3 and x2+ = 0.5 x1 + 0.2 x2^2
EXAMPLE_MONOMIALS: tuple[tuple[Monomial, ...], ...] = (
    (((0, 1), 1.0), ((3, 0), 1.0)),
    (((1, 0), 0.5), ((0, 2), 0.2)),
)


@dataclass(frozen=True)
class GammaConfig:
    values: tuple[float, ...] | None = (3.0, 0.4)
    derive_from_monomials: bool = False
    factor: float = 1.3
    monomials: tuple[tuple[Monomial, ...], ...] = EXAMPLE_MONOMIALS


@dataclass(frozen=True)
class SynthesisConfig:
    Q: tuple[tuple[float, ...], ...] = ((1.0, 0.0), (0.0, 1.0))
    alpha: float = 1.0
    lmi_margin: float = 1e-9
    solver: str = "CLARABEL"
    refine_cancellation: bool = True
    coupled: bool = False
    robust_cancellation_surrogate: bool = False
    experimental_diagonal_delta: bool = False
    excitation_tol: float = 1e-8
    robust_samples: int = 100


@dataclass(frozen=True)
class CertifyConfig:
    gamma: float = 11.5
    P: tuple[tuple[float, ...], ...] | None = None
    grid_res: int = 201
    domain_box: Box | None = EXAMPLE_DOMAIN_BOX
    gamma_search: tuple[float, float] | None = None
    monte_carlo_samples: int = 0


@dataclass(frozen=True)
class SimulateConfig:
    num_trajectories: int = 100
    steps: int = 200
    seed: int = 0


@dataclass(frozen=True)
class OutputConfig:
    out_dir: str = "./out"
    write_grid: bool = True
    write_svg: bool = True


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved run configuration; every default reproduces the worked example."""

    fixture: str | None = DEFAULT_FIXTURE
    fixture_dir: str | None = None
    plant: str = DEFAULT_FIXTURE
    kernel: KernelSpec = field(default_factory=KernelSpec)
    lam: float = 1e-7
    gamma: GammaConfig = field(default_factory=GammaConfig)
    drift: ExperimentConfig = field(
        default_factory=lambda: ExperimentConfig(num_samples=10, state_box=EXAMPLE_STATE_BOX)
    )
    forced: ExperimentConfig = field(
        default_factory=lambda: ExperimentConfig(
            num_samples=10,
            state_box=EXAMPLE_STATE_BOX,
            input_box=EXAMPLE_INPUT_BOX,
            seed=1,
            mode=ExperimentMode.FORCED,
        )
    )
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    certify: CertifyConfig = field(default_factory=CertifyConfig)
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.lam >= 0:
            raise ConfigError(f"interp.lambda must be >= 0, got {self.lam}")
        if self.gamma.values is None and not self.gamma.derive_from_monomials:
            raise ConfigError("gamma.values is missing and gamma.derive_from_monomials is off")
        if self.gamma.factor < 1.0:
            raise ConfigError(f"gamma.factor must be >= 1, got {self.gamma.factor}")
        if self.certify.gamma <= 0:
            raise ConfigError(f"certify.gamma must be > 0, got {self.certify.gamma}")
        if self.certify.grid_res < 2:
            raise ConfigError(f"certify.grid_res must be >= 2, got {self.certify.grid_res}")
        if self.synthesis.alpha < 0:
            raise ConfigError(f"synthesis.alpha must be >= 0, got {self.synthesis.alpha}")
        if self.simulate.steps < 0 or self.simulate.num_trajectories < 0:
            raise ConfigError("simulate.steps and simulate.num_trajectories must be >= 0")

    def payload(self) -> dict[str, Any]:
        out = asdict(self)
        out["kernel"] = self.kernel.to_dict()
        for name in ("drift", "forced"):
            out[name]["mode"] = getattr(self, name).mode.value
        return json.loads(json.dumps(out))


def config_hash(config: PipelineConfig) -> str:
    canonical = json.dumps(config.payload(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _matrix(rows) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in row) for row in rows)


def _monomials(raw) -> tuple[tuple[Monomial, ...], ...]:
    return tuple(
        tuple((tuple(int(e) for e in term["exponents"]), float(term["coef"])) for term in component)
        for component in raw
    )


def _experiment(raw: dict, base: ExperimentConfig, seed: int) -> ExperimentConfig:
    return ExperimentConfig(
        num_samples=int(raw.get("num_samples", base.num_samples)),
        state_box=as_box(raw.get("state_box", base.state_box)),
        input_box=as_box(raw.get("input_box", base.input_box)),
        seed=int(raw.get("seed", base.seed + seed)),
        mode=base.mode,
        trajectory=bool(raw.get("trajectory", base.trajectory)),
    )


def _env_defaults() -> dict[str, Any]:
    load_dotenv()
    return {
        "solver": os.getenv("KERNEL_CONTROL_SOLVER", "CLARABEL"),
        "out_dir": os.getenv("KERNEL_CONTROL_OUT_DIR", "./out"),
        "seed": int(os.getenv("KERNEL_CONTROL_SEED", "0")),
    }


def config_from_dict(raw: dict[str, Any], env: dict[str, Any] | None = None) -> PipelineConfig:
    """Build a PipelineConfig from parsed TOML tables; file values override env values."""
    env = env if env is not None else _env_defaults()
    base = PipelineConfig()
    try:
        seed = int(raw.get("seed", env.get("seed", 0)))
        if seed < 0:
            raise ConfigError(f"seed must be >= 0, got {seed}")
        gamma_raw = raw.get("gamma", {})
        synthesis_raw = dict(raw.get("synthesis", {}))
        certify_raw = dict(raw.get("certify", {}))
        simulate_raw = raw.get("simulate", {})
        output_raw = raw.get("output", {})
        experiment_raw = raw.get("experiment", {})

        if "values" in gamma_raw:
            gamma_values = tuple(float(v) for v in gamma_raw["values"])
        elif gamma_raw.get("derive_from_monomials"):
            gamma_values = None
        else:
            gamma_values = base.gamma.values if "gamma" not in raw else None
        gamma = GammaConfig(
            values=gamma_values,
            derive_from_monomials=bool(gamma_raw.get("derive_from_monomials", False)),
            factor=float(gamma_raw.get("factor", base.gamma.factor)),
            monomials=_monomials(gamma_raw["monomials"]) if "monomials" in gamma_raw else base.gamma.monomials,
        )
        if "Q" in synthesis_raw:
            synthesis_raw["Q"] = _matrix(synthesis_raw["Q"])
        synthesis_raw.setdefault("solver", env.get("solver", base.synthesis.solver))
        if certify_raw.get("P") is not None:
            certify_raw["P"] = _matrix(certify_raw["P"])
        if "domain_box" in certify_raw:
            certify_raw["domain_box"] = as_box(certify_raw["domain_box"]) if certify_raw["domain_box"] else None
        if "gamma_search" in certify_raw:
            lo, hi = certify_raw["gamma_search"]
            certify_raw["gamma_search"] = (float(lo), float(hi))
        output = OutputConfig(**{"out_dir": env.get("out_dir", base.output.out_dir), **output_raw})

        fixture = raw.get("fixture", base.fixture)
        return PipelineConfig(
            fixture=fixture or None,
            fixture_dir=raw.get("fixture_dir"),
            plant=str(raw.get("plant", base.plant)),
            kernel=KernelSpec.from_dict(raw["kernel"]) if "kernel" in raw else base.kernel,
            lam=float(raw.get("interp", {}).get("lambda", base.lam)),
            gamma=gamma,
            drift=_experiment(experiment_raw.get("drift", {}), base.drift, seed),
            forced=_experiment(experiment_raw.get("forced", {}), base.forced, seed),
            synthesis=SynthesisConfig(**synthesis_raw),
            certify=CertifyConfig(**certify_raw),
            simulate=SimulateConfig(**{"seed": seed, **simulate_raw}),
            output=output,
            seed=seed,
        )
    except (InputError, TypeError, KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"Invalid configuration: {exc}") from exc


def load_config(path: str | Path | None = None) -> PipelineConfig:
    if path is None:
        return config_from_dict({})
    try:
        with open(path, "rb") as f:
            raw = tomli.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"Config file not found: {path}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"Config file {path} is not valid TOML: {exc}") from exc
    return config_from_dict(raw)


def with_overrides(config: PipelineConfig, **overrides: Any) -> PipelineConfig:
    """Apply CLI flags on top of a resolved config; None values are ignored."""
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if not overrides:
        return config
    certify = config.certify
    output = config.output
    synthesis = config.synthesis
    simulate = config.simulate
    if "gamma" in overrides:
        certify = replace(certify, gamma=float(overrides["gamma"]))
    if "grid_res" in overrides:
        certify = replace(certify, grid_res=int(overrides["grid_res"]))
    if "out_dir" in overrides:
        output = replace(output, out_dir=str(overrides["out_dir"]))
    if "solver" in overrides:
        synthesis = replace(synthesis, solver=str(overrides["solver"]))
    seed = config.seed
    drift, forced = config.drift, config.forced
    if "seed" in overrides:
        seed = int(overrides["seed"])
        if seed < 0:
            raise ConfigError(f"seed must be >= 0, got {seed}")
        drift = replace(drift, seed=seed)
        forced = replace(forced, seed=seed + 1)
        simulate = replace(simulate, seed=seed)
    try:
        return replace(
            config,
            certify=certify,
            output=output,
            synthesis=synthesis,
            simulate=simulate,
            drift=drift,
            forced=forced,
            seed=seed,
            fixture_dir=overrides.get("fixture_dir", config.fixture_dir),
        )
    except InputError as exc:
        raise ConfigError(str(exc)) from exc
