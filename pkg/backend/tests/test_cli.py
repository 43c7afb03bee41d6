# Integration Tests for hcli
# File: test_cli.py
# Author: Transport Toolkit Team
# Date: 2026-10-14
# Purpose: Command output, CSV layout and exit codes of the command line interface

import json
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from app.cli.hcli import EXIT_CHECKS, EXIT_INVALID, EXIT_OK, EXIT_SOLVER, cli
from app.core.exceptions import SolverError
from app.diagnostics.reports import CheckReport
from app.schemas.documents import MeasureDocument, PlanDocument, RunManifest
from app.services import io_service
from app.solvers.kantorovich import solve_kantorovich


@pytest.fixture
def runner():
    return CliRunner()


class TestDist:
    """hcli dist"""

    @pytest.mark.parametrize(
        "coords, expected",
        [
            (["0", "0", "0", "--", "1", "0", "0"], "1.0"),
            (["1", "2", "3", "--", "1", "2", "3"], "0.0"),
            (["0", "0", "0", "--", "0", "0", "4"], "3.544907701811"),
            (["0.3", "-0.7", "2", "--", "0.3", "-0.7", "2"], "0.0"),
        ],
    )
    def test_closed_forms(self, runner, coords, expected):
        result = runner.invoke(cli, ["dist", *coords])
        assert result.exit_code == EXIT_OK
        assert result.output.strip() == expected

    def test_large_distance_digits(self, runner):
        """Magnitude does not add printed digits"""
        result = runner.invoke(cli, ["dist", "0", "0", "0", "--", "123456.78901234567", "0", "0"])
        assert result.exit_code == EXIT_OK
        printed = result.output.strip()
        assert printed == "123456.7890123"
        assert len(printed.replace(".", "")) <= 13

    @pytest.mark.parametrize("coords", [["0", "0", "0", "1", "0"], ["a", "0", "0", "1", "0", "0"], ["0", "0", "1", "0"]])
    def test_malformed_coordinates(self, runner, coords):
        result = runner.invoke(cli, ["dist", *coords])
        assert result.exit_code == EXIT_INVALID


class TestGeod:
    """hcli geod"""

    def test_rows_and_header(self, runner):
        result = runner.invoke(cli, ["geod", "--steps", "4", "0", "0", "0", "--", "1", "0", "1"])
        assert result.exit_code == EXIT_OK
        lines = result.output.splitlines()
        assert lines[0] == "s,xi1,eta1,t"
        assert len(lines) == 6
        assert [float(v) for v in lines[1].split(",")] == [0.0, 0.0, 0.0, 0.0]

    def test_center_line_comment(self, runner):
        result = runner.invoke(cli, ["geod", "--steps", "2", "0", "0", "0", "--", "0", "0", "1"])
        assert result.exit_code == EXIT_OK
        assert result.output.startswith("# canonical center selection")

    def test_strict_center_line(self, runner):
        result = runner.invoke(cli, ["geod", "--strict", "0", "0", "0", "--", "0", "0", "1"])
        assert result.exit_code == EXIT_INVALID

    def test_writes_csv_file(self, runner, temp_output_dir):
        target = temp_output_dir / "curve.csv"
        result = runner.invoke(cli, ["geod", "--steps", "2", "--out", str(target), "0", "0", "0", "--", "1", "0", "0"])
        assert result.exit_code == EXIT_OK
        last = [float(v) for v in target.read_text().splitlines()[-1].split(",")]
        assert last == pytest.approx([1.0, 1.0, 0.0, 0.0], abs=1e-12)


class TestVerify:
    """hcli verify with the suites stubbed out"""

    def test_corrupted_plan_file(self, runner, small_measures, temp_output_dir):
        plan, _, _ = solve_kantorovich(*small_measures)
        payload = PlanDocument.from_plan(plan).model_dump()
        payload["entries"][0] = [payload["entries"][0][0], payload["entries"][0][1], 0.9]
        path = temp_output_dir / "plan.json"
        path.write_text(json.dumps(payload))
        with patch("app.cli.hcli.run_suite", return_value=[]):
            result = runner.invoke(cli, ["verify", "transport", "--plan", str(path)])
        assert result.exit_code == EXIT_INVALID

    def test_plan_file_checks(self, runner, small_measures, temp_output_dir):
        plan, _, _ = solve_kantorovich(*small_measures)
        path = io_service.save_document(PlanDocument.from_plan(plan), temp_output_dir / "plan.json")
        with patch("app.cli.hcli.run_suite", return_value=[]):
            result = runner.invoke(cli, ["verify", "transport", "--plan", str(path), "--out", str(temp_output_dir)])
        assert result.exit_code == EXIT_OK
        assert (temp_output_dir / "summary.csv").is_file()
        assert json.loads((temp_output_dir / "reports.json").read_text())["passed"] is True

    def test_failed_check_exit_code(self, runner):
        failing = [CheckReport.from_residuals("demo", [1.0], 0.0)]
        with patch("app.cli.hcli.run_suite", return_value=failing):
            result = runner.invoke(cli, ["verify", "geometry"])
        assert result.exit_code == EXIT_CHECKS

    def test_solver_failure_exit_code(self, runner):
        with patch("app.cli.hcli.run_suite", side_effect=SolverError("no optimal vertex", stage="secondary")):
            result = runner.invoke(cli, ["verify", "transport"])
        assert result.exit_code == EXIT_SOLVER

    def test_unknown_suite(self, runner):
        result = runner.invoke(cli, ["verify", "everything"])
        assert result.exit_code != EXIT_OK


class TestPipeline:
    """hcli pipeline on a small instance"""

    def test_small_run(self, runner, temp_output_dir):
        nu_path = temp_output_dir / "nu.json"
        nu_path.write_text(
            MeasureDocument(atoms=[[0.4, 0.5, 0.5], [0.6, 0.5, 0.4]], weights=[0.5, 0.5]).model_dump_json()
        )
        out = temp_output_dir / "run"
        result = runner.invoke(
            cli,
            ["pipeline", "--nu", str(nu_path), "--eps", "0.5,0.1", "--samples", "60", "--out", str(out)],
        )
        manifest = io_service.load_document(out / "manifest.json", RunManifest)
        assert manifest.config.epsilons == [0.5, 0.1]
        assert result.exit_code == (EXIT_CHECKS if manifest.failed_checks else EXIT_OK)
        assert (out / "ledger.csv").is_file()

    def test_bad_schedule(self, runner, temp_output_dir):
        result = runner.invoke(cli, ["pipeline", "--eps", "0.1,0.5", "--samples", "20", "--out", str(temp_output_dir)])
        assert result.exit_code == EXIT_INVALID

    def test_malformed_measure_file(self, runner, temp_output_dir):
        nu_path = temp_output_dir / "nu.json"
        nu_path.write_text(json.dumps({"atoms": [[0.0, 0.0, 0.0]], "weights": [0.3]}))
        result = runner.invoke(cli, ["pipeline", "--nu", str(nu_path), "--out", str(temp_output_dir)])
        assert result.exit_code == EXIT_INVALID
