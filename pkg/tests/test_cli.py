"""Configuration, Gamma derivation, reporting and the command-line entry point."""
from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
import pytest

from kernel_control.cli import (
    PipelineConfig,
    RunLoggerAdapter,
    config_from_dict,
    config_hash,
    derive_gamma_from_monomials,
    load_config,
    render_invariance_svg,
    with_overrides,
)
from kernel_control.cli.config import EXAMPLE_MONOMIALS
from kernel_control.cli.main import EXIT_FAILED, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, main, run_command
from kernel_control.core.errors import ConfigError
from kernel_control.invariance import GridSpec, evaluate_grid, residual_evaluator, simulate_many

ENV = {"solver": "CLARABEL", "out_dir": "./out", "seed": 0}


class TestConfig:
    def test_defaults(self):
        c = config_from_dict({}, env=ENV)
        assert c.fixture == "paper-sec4"
        assert c.lam == 1e-7
        assert c.gamma.values == (3.0, 0.4)
        assert c.certify.gamma == 11.5
        assert c.synthesis.solver == "CLARABEL"

    def test_negative_lambda(self):
        with pytest.raises(ConfigError):
            config_from_dict({"interp": {"lambda": -1.0}}, env=ENV)

    def test_gamma_table_needs_values_or_derivation(self):
        with pytest.raises(ConfigError):
            config_from_dict({"gamma": {"factor": 1.3}}, env=ENV)

    def test_unknown_key_is_config_error(self):
        with pytest.raises(ConfigError):
            config_from_dict({"certify": {"no_such_option": 1}}, env=ENV)

    def test_hash_is_deterministic(self):
        a = config_from_dict({"seed": 3}, env=ENV)
        b = config_from_dict({"seed": 3}, env=ENV)
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(config_from_dict({"seed": 4}, env=ENV))

    def test_overrides(self):
        c = with_overrides(PipelineConfig(), seed=5, gamma=2.0, grid_res=51, out_dir="/tmp/x", solver=None)
        assert c.seed == 5
        assert c.drift.seed == 5 and c.forced.seed == 6 and c.simulate.seed == 5
        assert c.certify.gamma == 2.0
        assert c.certify.grid_res == 51
        assert c.output.out_dir == "/tmp/x"
        assert c.synthesis.solver == PipelineConfig().synthesis.solver

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.toml")

    def test_load_bad_toml(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("seed = [1,\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_load_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('[certify]\ngamma = 4.0\ngrid_res = 21\n[gamma]\nvalues = [2.0, 1.0]\n', encoding="utf-8")
        c = load_config(path)
        assert c.certify.gamma == 4.0
        assert c.certify.grid_res == 21
        assert c.gamma.values == (2.0, 1.0)


class TestGammaDerivation:
    def test_example_norms(self, example_run):
        d = derive_gamma_from_monomials([dict(c) for c in EXAMPLE_MONOMIALS], example_run.model)
        assert d.norm_sq == pytest.approx([2.0, 0.29], rel=1e-5)
        assert d.closed_form_norm_sq == pytest.approx([2.0, 0.29], rel=1e-9)
        assert d.suggested == pytest.approx(1.3 * np.sqrt([2.0, 0.29]), rel=1e-5)
        assert d.rank == d.num_monomials == 9

    def test_zero_function(self, example_run):
        d = derive_gamma_from_monomials([{}, {}], example_run.model)
        assert np.all(d.norm_sq == 0.0)

    def test_coverage_readings(self, example_run):
        d = derive_gamma_from_monomials([dict(c) for c in EXAMPLE_MONOMIALS], example_run.model)
        assert d.covers([3.0, 0.4]) == {"norm": False, "norm_sq": True}


class TestLogging:
    def test_run_id_prefix(self, caplog):
        adapter = RunLoggerAdapter(logging.getLogger("kernel_control.test"))
        adapter.set_run_id("abc123")
        with caplog.at_level(logging.INFO, logger="kernel_control.test"):
            adapter.info("fitted %d centers", 10)
        assert "[run_id=abc123] fitted 10 centers" in caplog.text


class TestPlotting:
    def test_svg_has_set_and_trajectories(self, example_run):
        e = residual_evaluator(example_run.problem, example_run.result, example_run.cert, example_run.bound)
        ev = evaluate_grid(e, example_run.cert, GridSpec.covering(example_run.cert, 21))
        traj = simulate_many(example_run.constants.plant, example_run.result, np.array([[1.0, -1.0], [1.0, 0.5]]), 30)
        svg = render_invariance_svg(ev, example_run.cert, traj.states, title="R & X")
        assert svg.startswith("<svg ")
        assert "<polygon" in svg
        assert svg.count("<polyline") == 2
        assert "R &amp; X" in svg


class TestMain:
    def test_fit_writes_report(self, tmp_path, capsys):
        assert main(["fit", "--out", str(tmp_path), "--json"]) == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert printed["status"] == "pass"
        assert set(printed["stages"]) == {"data", "fit"}
        report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert report["config_hash"] == printed["config_hash"]
        assert (tmp_path / "model.json").exists()

    def test_missing_config_exit_code(self, tmp_path):
        assert main(["fit", "--config", str(tmp_path / "nope.toml"), "--out", str(tmp_path)]) == EXIT_INPUT

    def test_unknown_fixture_exit_code(self, tmp_path):
        assert main(["fit", "--fixture-dir", str(tmp_path / "empty"), "--out", str(tmp_path)]) == EXIT_INPUT

    def test_runs_are_reproducible(self, tmp_path):
        config = with_overrides(PipelineConfig(), out_dir=str(tmp_path))
        logger = logging.getLogger("kernel_control")
        first = run_command("fit", config, logger)
        second = run_command("fit", config, logger)
        assert first.run_id != second.run_id
        stable = [json.dumps(r.payload(include_volatile=False), sort_keys=True, default=str) for r in (first, second)]
        assert stable[0] == stable[1]


class TestPipelineCommands:
    def test_synthesize_writes_controller(self, tmp_path, capsys):
        assert main(["synthesize", "--out", str(tmp_path), "--json"]) == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert set(printed["stages"]) == {"data", "fit", "synthesize"}
        assert (tmp_path / "synthesis.json").exists()

    def test_huge_gamma_is_not_certified(self, tmp_path, capsys):
        code = main(["certify", "--gamma", "1e6", "--grid-res", "51", "--out", str(tmp_path), "--json"])
        printed = json.loads(capsys.readouterr().out)
        assert code == EXIT_FAILED
        assert printed["status"] in ("inconclusive", "violated")
        assert printed["stages"]["certify"]["certificate"]["verdict"] == printed["status"]

    def test_large_regularization_warns_about_uncertainty(self, tmp_path, caplog):
        config = tmp_path / "lam.toml"
        config.write_text("[interp]\nlambda = 0.1\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING, logger="kernel_control"):
            code = main(["synthesize", "--config", str(config), "--out", str(tmp_path / "out")])
        assert code in (EXIT_OK, EXIT_INFEASIBLE)
        assert "Uncertainty bound" in caplog.text

    def test_simulated_config_runs_every_stage(self, tmp_path, capsys):
        config = Path(__file__).parents[1] / "configs" / "simulated.toml"
        assert main(["simulate", "--config", str(config), "--out", str(tmp_path), "--json"]) == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert set(printed["stages"]) == {"data", "fit", "synthesize", "certify", "simulate"}
        certify = printed["stages"]["certify"]
        assert certify["certificate"]["verdict"] == "certified"
        assert "gamma_search" in certify
        assert "monte_carlo" in certify
