from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from kernel_control.interp import ErrorBound, InterpModel, fit
from kernel_control.invariance import LyapunovCert
from kernel_control.plant import FixtureConstants, ForcedDataset, load_fixture
from kernel_control.synthesis import CvxpyBackend, SynthesisProblem, SynthesisResult, build_problem, synthesize

EXAMPLE_FIXTURE = "paper-sec4"


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--solver",
        action="store",
        default="CLARABEL",
        help="cvxpy solver used by the synthesis tests.",
    )


@pytest.fixture(scope="session")
def solver_name(request: pytest.FixtureRequest) -> str:
    return str(request.config.getoption("--solver"))


@pytest.fixture(scope="session")
def backend(solver_name: str) -> CvxpyBackend:
    return CvxpyBackend(solver_name)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@dataclass
class ExampleRun:
    constants: FixtureConstants
    forced: ForcedDataset
    model: InterpModel
    bound: ErrorBound
    problem: SynthesisProblem
    result: SynthesisResult
    cert: LyapunovCert


@pytest.fixture(scope="session")
def example_run(backend: CvxpyBackend) -> ExampleRun:
    """The worked example solved once per session."""
    drift, forced, constants = load_fixture(EXAMPLE_FIXTURE)
    model = fit(drift, constants.kernel, constants.lam, domain_box=constants.domain_box)
    bound = ErrorBound(gamma=constants.gamma, model=model)
    problem = build_problem(model, forced, bound, constants.Q, constants.alpha)
    result = synthesize(problem, backend=backend)
    cert = LyapunovCert(P=constants.reference_P, Q=constants.Q, gamma=constants.reference_gamma)
    return ExampleRun(constants, forced, model, bound, problem, result, cert)
