from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import uuid
from dataclasses import replace
from typing import Sequence

from dotenv import load_dotenv

from ..core.enums import Verdict
from ..core.errors import (
    ConfigError,
    ExcitationError,
    InputError,
    KernelControlError,
    SingularGramError,
    SynthesisInfeasibleError,
    UnknownFixtureError,
)
from ..files import LocalArtifactStorage
from ..plant import load_fixture
from .checks import example_checks
from .config import PipelineConfig, config_hash, load_config, with_overrides
from .pipeline import KernelControlPipeline
from .report import CheckResult, RunReport

LOGGER_NAME = "kernel_control"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_EXCITATION = 4

COMMAND_STAGES = {
    "fit": ("data", "fit"),
    "synthesize": ("data", "fit", "synthesize"),
    "certify": ("data", "fit", "synthesize", "certify"),
    "simulate": ("data", "fit", "synthesize", "certify", "simulate"),
    "reproduce-paper": ("data", "fit", "synthesize", "certify", "simulate"),
}


def setup_logging(level: str | None = None) -> logging.Logger:
    load_dotenv()
    level = (level or os.getenv("KERNEL_CONTROL_LOG_LEVEL", "INFO")).upper()
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    if not logger.handlers:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
        logger.addHandler(console_handler)
    return logger


def exit_code_for(exc: KernelControlError) -> int:
    if isinstance(exc, SynthesisInfeasibleError):
        return EXIT_INFEASIBLE
    if isinstance(exc, ExcitationError):
        return EXIT_EXCITATION
    if isinstance(exc, (ConfigError, InputError, UnknownFixtureError, SingularGramError)):
        return EXIT_INPUT
    return EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kernel-control",
        description="Kernel-based nonlinearity-cancelling controller synthesis from data.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML configuration file")
    common.add_argument("--seed", type=int, help="base seed for every random draw")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--json", action="store_true", help="print the run report as JSON")
    common.add_argument("--grid-res", type=int, help="certification grid points per axis")
    common.add_argument("--gamma", type=float, help="sublevel set value to certify")
    common.add_argument("--fixture-dir", metavar="DIR", help="directory holding fixture folders")
    common.add_argument("--solver", help="cvxpy solver name")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("fit", "learn the drift interpolant and its error bound"),
        ("synthesize", "solve the controller synthesis program"),
        ("certify", "grid-certify positive invariance of a sublevel set"),
        ("simulate", "simulate the closed loop from the certified set"),
        ("reproduce-paper", "run the worked example end to end and check its results"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config)
    return with_overrides(
        config,
        seed=args.seed,
        out_dir=args.out,
        grid_res=args.grid_res,
        gamma=args.gamma,
        fixture_dir=args.fixture_dir,
        solver=args.solver,
    )


def _verdict_status(report: RunReport, pipeline: KernelControlPipeline) -> None:
    cert = pipeline.state.certificate
    if cert is None:
        report.status = "pass"
        return
    report.checks.append(
        CheckResult("pi_certified", cert.verdict is Verdict.CERTIFIED, f"verdict={cert.verdict.value}")
    )
    if cert.verdict is Verdict.CERTIFIED:
        report.status = "pass"
    else:
        report.status = cert.verdict.value
        report.exit_code = EXIT_FAILED
        report.reason = f"invariance {cert.verdict.value} for gamma={cert.cert.gamma:g}"


def run_command(
    command: str, config: PipelineConfig, logger: logging.Logger, *, explicit_gamma: bool = False
) -> RunReport:
    run_id = uuid.uuid4().hex
    storage = LocalArtifactStorage(config.output.out_dir)
    lyapunov_P = None
    constants = None
    if command == "reproduce-paper":
        if not config.fixture:
            raise ConfigError("reproduce-paper needs a fixture")
        _, _, constants = load_fixture(config.fixture, config.fixture_dir)
        lyapunov_P = constants.reference_P
        if not explicit_gamma:
            config = replace(config, certify=replace(config.certify, gamma=constants.reference_gamma))

    report = RunReport(command=command, config_hash=config_hash(config), run_id=run_id)
    pipeline = KernelControlPipeline(config, logger, storage=storage, lyapunov_P=lyapunov_P)
    try:
        for update in pipeline.run(COMMAND_STAGES[command], run_id, report.timings):
            if update["stage"] != "done":
                report.stages[update["stage"]] = update.get("artifacts", {})
    except KernelControlError as exc:
        report.status = "error"
        report.exit_code = exit_code_for(exc)
        report.reason = f"{type(exc).__name__}: {exc}"
        logger.error("Run %s failed: %s", run_id, report.reason)
    else:
        if constants is not None:
            report.checks = example_checks(pipeline.state, constants, config.synthesis.excitation_tol)
            failed = report.failed_checks
            report.status = "fail" if failed else "pass"
            report.exit_code = EXIT_FAILED if failed else EXIT_OK
            report.reason = f"failed checks: {', '.join(failed)}" if failed else None
        else:
            _verdict_status(report, pipeline)

    if constants is not None and report.status == "error":
        report.checks = example_checks(pipeline.state, constants, config.synthesis.excitation_tol)
    report.files = list(pipeline.files)
    path = storage.save_text(
        storage.build_path("report.json"),
        json.dumps(report.payload(), indent=2, sort_keys=True, default=str) + "\n",
    )
    report.files.append(path)
    return report


def _summary(report: RunReport) -> str:
    lines = [f"{report.command}: {report.status} (exit {report.exit_code})"]
    if report.reason:
        lines.append(f"  reason: {report.reason}")
    for check in report.checks:
        mark = "ok  " if check.passed else "FAIL"
        lines.append(f"  [{mark}] {check.name}: {check.detail}")
    lines.append(f"  config hash: {report.config_hash}")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logger = setup_logging()
    try:
        config = _resolve_config(args)
        report = run_command(args.command, config, logger, explicit_gamma=args.gamma is not None)
    except KernelControlError as exc:
        code = exit_code_for(exc)
        logger.error("%s failed before the pipeline started: %s", args.command, exc)
        if args.json:
            print(json.dumps({"command": args.command, "status": "error", "exit_code": code, "reason": str(exc)}))
        return code
    if args.json:
        print(json.dumps(report.payload(), indent=2, sort_keys=True, default=str))
    else:
        print(_summary(report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
