from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass
from typing import Any, Iterator, Sequence

import numpy as np

from ..core.enums import KernelFamily
from ..core.errors import InputError
from ..core.matrix_io import matrix_payload
from ..core.progress_payload import ProgressPayload
from ..files import ArtifactStorage, LocalArtifactStorage
from ..interp import DriftDataset, ErrorBound, InterpModel, delta_batch, fit
from ..invariance import (
    GridSpec,
    LyapunovCert,
    PiCertificate,
    Trajectory,
    certify_pi,
    delta_growth_ratio,
    find_largest_gamma,
    grid_csv,
    lyapunov_values,
    residual_evaluator,
    sample_pi,
    sample_sublevel_set,
    simulate_many,
)
from ..plant import (
    FixtureConstants,
    ForcedDataset,
    PlantModel,
    builtin_plant,
    check_excitation,
    collect_drift_data,
    collect_forced_data,
    forced_dataset,
    load_fixture,
    save_drift_dataset,
    save_forced_dataset,
)
from ..synthesis import (
    CvxpyBackend,
    SdpBackend,
    SynthesisProblem,
    SynthesisResult,
    build_problem,
    closed_loop_matrices,
    spectral_radius,
    synthesize,
    verify_robust_condition,
)
from .config import PipelineConfig
from .gamma import GammaDerivation, derive_gamma_from_monomials
from .plotting import render_invariance_svg

STAGES = ("data", "fit", "synthesize", "certify", "simulate")
GROWTH_RADII = (1.0, 2.0, 4.0, 8.0)
PLOTTED_TRAJECTORIES = 20


class RunLoggerAdapter(logging.LoggerAdapter):
    def __init__(self, logger: logging.Logger) -> None:
        super().__init__(logger, {})
        self._run_id: str | None = None

    def set_run_id(self, run_id: str) -> None:
        self._run_id = run_id

    def process(self, msg, kwargs):
        if self._run_id:
            return f"[run_id={self._run_id}] {msg}", kwargs
        return msg, kwargs


@dataclass
class RunState:
    plant: PlantModel | None = None
    constants: FixtureConstants | None = None
    drift: DriftDataset | None = None
    forced: ForcedDataset | None = None
    model: InterpModel | None = None
    bound: ErrorBound | None = None
    gamma_derivation: GammaDerivation | None = None
    problem: SynthesisProblem | None = None
    result: SynthesisResult | None = None
    lyapunov: LyapunovCert | None = None
    certificate: PiCertificate | None = None
    trajectories: Trajectory | None = None


class KernelControlPipeline:
    """Runs the learn / synthesize / certify stages and streams progress."""

    def __init__(
        self,
        config: PipelineConfig,
        logger: logging.Logger,
        storage: ArtifactStorage | None = None,
        backend: SdpBackend | None = None,
        lyapunov_P: np.ndarray | None = None,
    ) -> None:
        self.config = config
        self.logger = RunLoggerAdapter(logger)
        self.storage = storage or LocalArtifactStorage(config.output.out_dir)
        self._backend = backend
        self.lyapunov_P = lyapunov_P
        self.state = RunState()
        self.files: list[str] = []

    @property
    def backend(self) -> SdpBackend:
        if self._backend is None:
            self._backend = CvxpyBackend(self.config.synthesis.solver)
        return self._backend

    def run(
        self, stages: Sequence[str], run_id: str, timings: dict[str, float] | None = None
    ) -> Iterator[ProgressPayload]:
        unknown = [s for s in stages if s not in STAGES]
        if unknown:
            raise InputError(f"Unknown stages {unknown}. Must be among {list(STAGES)}")
        self.logger.set_run_id(run_id)
        steps = [*stages, "done"]
        total_steps = len(steps)

        def report_progress(stage: str, artifacts: dict[str, Any] | None = None) -> ProgressPayload:
            step_index = steps.index(stage)
            payload: ProgressPayload = {
                "stage": stage,
                "step": step_index + 1,
                "total_steps": total_steps,
                "percent": int(((step_index + 1) / total_steps) * 100),
                "files": list(self.files),
            }
            if artifacts is not None:
                payload["artifacts"] = artifacts
            return payload

        self.logger.info("Start pipeline: %s", ", ".join(stages))
        for stage in stages:
            started = time.perf_counter()
            artifacts = getattr(self, f"_stage_{stage}")()
            if timings is not None:
                timings[stage] = time.perf_counter() - started
            self.logger.info("Stage %s finished", stage)
            yield report_progress(stage, artifacts)
        yield report_progress("done")

    def _save(self, *parts: str, content: str) -> None:
        self.files.append(self.storage.save_text(self.storage.build_path(*parts), content))

    def _stage_data(self) -> dict[str, Any]:
        c = self.config
        s = self.state
        if c.fixture:
            s.drift, s.forced, s.constants = load_fixture(c.fixture, c.fixture_dir)
            s.plant = s.constants.plant
            self.logger.info("Loaded fixture %s", c.fixture)
        else:
            s.plant = builtin_plant(c.plant)
            s.drift = collect_drift_data(s.plant, c.drift)
            self.logger.info("Collected %d drift samples (seed=%d)", s.drift.T, c.drift.seed)
        self.files.extend(
            save_drift_dataset(
                self.storage, "fixtures/drift", s.drift, seed=None if c.fixture else c.drift.seed, kernel_id=c.kernel.kernel_id
            )
        )
        return {"source": c.fixture or "simulated", "n": s.drift.n, "T": s.drift.T, "plant": s.plant.name}

    def _derive_gamma(self, model: InterpModel) -> GammaDerivation | None:
        g = self.config.gamma
        if model.kernel.family is not KernelFamily.POLYNOMIAL_SUM or not g.monomials:
            return None
        try:
            return derive_gamma_from_monomials([dict(c) for c in g.monomials], model, g.factor)
        except InputError as exc:
            if g.derive_from_monomials:
                raise
            self.logger.warning("Gamma derivation skipped: %s", exc)
            return None

    def _stage_fit(self) -> dict[str, Any]:
        c = self.config
        s = self.state
        s.model = fit(s.drift, c.kernel, c.lam, domain_box=c.certify.domain_box)
        s.gamma_derivation = self._derive_gamma(s.model)
        if c.gamma.values is not None:
            gamma = np.asarray(c.gamma.values, dtype=float)
        else:
            gamma = s.gamma_derivation.suggested
        s.bound = ErrorBound(gamma=gamma, model=s.model)

        if s.forced is None:
            s.forced = collect_forced_data(s.plant, c.forced, s.model)
            self.logger.info("Collected %d forced samples (seed=%d)", s.forced.Tbar, c.forced.seed)
        else:
            f = s.forced
            s.forced = forced_dataset(f.Xbar0, f.Xbar1, f.U0, s.model.kernel, s.model.centers)
        self.files.extend(
            save_forced_dataset(
                self.storage, "fixtures/forced", s.forced, seed=None if c.fixture else c.forced.seed, kernel_id=c.kernel.kernel_id
            )
        )
        deltas = delta_batch(s.bound, s.forced.Xbar0)
        excitation = check_excitation(s.forced.U0, c.synthesis.excitation_tol)
        artifacts = {
            "kernel": c.kernel.to_dict(),
            "lambda": c.lam,
            "fit_residual": s.model.fit_residual(s.drift.X1),
            "gram_min_eig": s.model.gram.min_eig,
            "gram_max_eig": s.model.gram.max_eig,
            "A": matrix_payload(s.model.A),
            "gamma": gamma.tolist(),
            "gamma_derivation": None if s.gamma_derivation is None else s.gamma_derivation.payload(),
            "delta_at_forced_states": deltas.tolist(),
            "delta_growth": delta_growth_ratio(s.bound, GROWTH_RADII),
            "excitation": {
                "ok": excitation.ok,
                "sigma_min": excitation.sigma_min,
                "sigma_max": excitation.sigma_max,
            },
        }
        self._save("model.json", content=json.dumps(artifacts, indent=2, sort_keys=True) + "\n")
        return artifacts

    def _stage_synthesize(self) -> dict[str, Any]:
        c = self.config.synthesis
        s = self.state
        s.problem = build_problem(
            s.model,
            s.forced,
            s.bound,
            np.asarray(c.Q, dtype=float),
            c.alpha,
            excitation_tol=c.excitation_tol,
            experimental_diagonal_delta=c.experimental_diagonal_delta,
        )
        s.result = synthesize(
            s.problem,
            backend=self.backend,
            margin=c.lmi_margin,
            refine_cancellation=c.refine_cancellation,
            coupled=c.coupled,
            robust_cancellation_surrogate=c.robust_cancellation_surrogate,
        )
        Psi0, _ = closed_loop_matrices(s.result, s.problem)
        robust = verify_robust_condition(s.result, s.problem, c.robust_samples, self.config.seed)
        artifacts = {
            **s.result.payload(),
            "delta_norm": s.problem.delta_norm,
            "spectral_radius": spectral_radius(Psi0),
            "residual_row_norms": np.linalg.norm(s.result.residual, axis=1).tolist(),
            "robust_check": {"max_eig": robust.max_eig, "violations": robust.violations, "samples": robust.num_samples},
        }
        self.logger.info(
            "Synthesized controller: |residual|=%.3e, |P|=%.4f, spectral radius %.4f",
            s.result.cancellation_norm,
            s.result.P_norm,
            artifacts["spectral_radius"],
        )
        self._save("synthesis.json", content=json.dumps(artifacts, indent=2, sort_keys=True) + "\n")
        return artifacts

    def _lyapunov(self) -> LyapunovCert:
        c = self.config.certify
        s = self.state
        if c.P is not None:
            P = np.asarray(c.P, dtype=float)
        elif self.lyapunov_P is not None:
            P = np.asarray(self.lyapunov_P, dtype=float)
        else:
            P = s.result.P
        return LyapunovCert(P=P, Q=s.problem.Q, gamma=c.gamma)

    def _stage_certify(self) -> dict[str, Any]:
        c = self.config.certify
        s = self.state
        s.lyapunov = self._lyapunov()
        evaluator = residual_evaluator(s.problem, s.result, s.lyapunov, s.bound)
        grid = GridSpec.covering(s.lyapunov, c.grid_res)
        s.certificate = certify_pi(evaluator, s.lyapunov, grid, domain_box=c.domain_box)
        artifacts: dict[str, Any] = {"certificate": s.certificate.payload(), "P": matrix_payload(s.lyapunov.P)}
        self.logger.info(
            "Invariance verdict for gamma=%g: %s (Z empty: %s)",
            c.gamma,
            s.certificate.verdict.value,
            s.certificate.Z_empty,
        )
        if c.gamma_search is not None:
            search = find_largest_gamma(
                evaluator, s.lyapunov, c.gamma_search, resolution=c.grid_res, domain_box=c.domain_box
            )
            artifacts["gamma_search"] = {
                "gamma": search.gamma,
                "tried": [[g, v.value] for g, v in search.tried],
            }
        if c.monte_carlo_samples:
            mc = sample_pi(evaluator, s.lyapunov, c.monte_carlo_samples, self.config.seed)
            artifacts["monte_carlo"] = mc.payload()
        if self.config.output.write_grid and s.certificate.evaluation is not None:
            self._save("grids", "certify.csv", content=grid_csv(s.certificate.evaluation))
        return artifacts

    def _stage_simulate(self) -> dict[str, Any]:
        c = self.config.simulate
        s = self.state
        cert = s.lyapunov or self._lyapunov()
        rng = np.random.default_rng(c.seed)
        starts = sample_sublevel_set(cert, c.num_trajectories, rng)
        s.trajectories = simulate_many(s.plant, s.result, starts, c.steps)
        states = s.trajectories.states
        V = np.stack([lyapunov_values(cert, states[k]) for k in range(states.shape[0])])
        finite = np.isfinite(V)
        final_norms = np.linalg.norm(s.trajectories.final, axis=0)
        final_norms = final_norms[np.isfinite(final_norms)]
        artifacts = {
            "num_trajectories": c.num_trajectories,
            "steps": c.steps,
            "gamma": cert.gamma,
            "max_V": float(np.max(V[finite])) if finite.any() else None,
            "max_final_norm": float(np.max(final_norms)) if final_norms.size else None,
            "diverged": int(np.sum(s.trajectories.diverged)),
        }
        if (
            self.config.output.write_svg
            and s.certificate is not None
            and s.certificate.evaluation is not None
            and cert.n == 2
        ):
            svg = render_invariance_svg(
                s.certificate.evaluation,
                cert,
                states[:, :, :PLOTTED_TRAJECTORIES],
                title=f"gamma = {cert.gamma:g}, verdict: {s.certificate.verdict.value}",
            )
            self._save("figures", "invariance.svg", content=svg)
        return artifacts
