# Unit Tests for Documents and IO
# File: test_io_service.py
# Author: Transport Toolkit Team
# Date: 2026-10-13
# Purpose: Schema-versioned JSON documents and deterministic CSV output

import json

import numpy as np
import pandas as pd
import pytest

from app.core.exceptions import InvalidInputError
from app.diagnostics.reports import CheckReport
from app.measures.atomic import AtomicMeasure
from app.schemas.documents import MeasureDocument, PlanDocument, ReportsDocument, RunConfig, SourceDocument
from app.services.io_service import format_csv, load_document, save_document, write_csv
from app.solvers.kantorovich import solve_kantorovich


class TestDocuments:
    """Document models"""

    def test_measure_document(self):
        doc = MeasureDocument(atoms=[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], weights=[0.25, 0.75])
        measure = doc.to_measure()
        assert measure.size == 2
        assert MeasureDocument.from_measure(measure).weights == [0.25, 0.75]
        assert doc.schema_version == "1.0"

    def test_schema_major_version_checked(self):
        with pytest.raises(ValueError):
            MeasureDocument(schema_version="2.0", atoms=[[0.0, 0.0, 0.0]], weights=[1.0])
        assert MeasureDocument(schema_version="1.3", atoms=[[0.0, 0.0, 0.0]], weights=[1.0])

    def test_source_document(self):
        source = SourceDocument(lower=[0.0, 0.0, 0.0], upper=[1.0, 2.0, 1.0])
        assert source.box().volume == pytest.approx(2.0)
        assert source.to_sampled().density_max == pytest.approx(0.5)

    def test_run_config_defaults(self):
        config = RunConfig()
        assert config.n == 1
        assert config.epsilons == [0.5, 0.2, 0.1, 0.05, 0.02]
        with pytest.raises(ValueError):
            RunConfig(epsilons=[])
        with pytest.raises(ValueError):
            RunConfig(N=0)


class TestJsonFiles:
    """load_document and save_document"""

    def test_plan_round_trip(self, small_measures, temp_output_dir):
        plan, _, _ = solve_kantorovich(*small_measures)
        path = save_document(PlanDocument.from_plan(plan, epsilon=0.1, label="m=2"), temp_output_dir / "plan.json")
        loaded = load_document(path, PlanDocument)
        assert loaded.label == "m=2"
        assert np.allclose(loaded.to_plan().matrix(), plan.matrix())

    def test_reports_use_pass_key(self, temp_output_dir):
        report = CheckReport.from_residuals("demo", [0.0], 1.0)
        path = save_document(ReportsDocument(suite="all", seed=0, passed=True, reports=[report]), temp_output_dir / "r.json")
        payload = json.loads(path.read_text())
        assert payload["reports"][0]["pass"] is True
        assert load_document(path, ReportsDocument).reports[0].passed

    def test_missing_file(self, temp_output_dir):
        with pytest.raises(InvalidInputError, match="file not found"):
            load_document(temp_output_dir / "absent.json", MeasureDocument)

    def test_malformed_json(self, temp_output_dir):
        path = temp_output_dir / "broken.json"
        path.write_text("{not json")
        with pytest.raises(InvalidInputError, match="broken.json"):
            load_document(path, MeasureDocument)

    def test_invalid_measure_names_file(self, temp_output_dir):
        path = temp_output_dir / "nu.json"
        path.write_text(json.dumps({"atoms": [[0.0, 0.0, 0.0]], "weights": [0.5]}))
        with pytest.raises(InvalidInputError, match="nu.json"):
            load_document(path, MeasureDocument).to_measure()

    def test_corrupted_plan_marginals(self, small_measures, temp_output_dir):
        plan, _, _ = solve_kantorovich(*small_measures)
        payload = PlanDocument.from_plan(plan).model_dump()
        payload["entries"][0] = [payload["entries"][0][0], payload["entries"][0][1], 0.9]
        path = temp_output_dir / "plan.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(InvalidInputError):
            load_document(path, PlanDocument).to_plan()


class TestCsv:
    """Deterministic tables"""

    def test_header_and_float_format(self, temp_output_dir):
        path = write_csv([[0.1, 1.0 / 3.0]], temp_output_dir / "t.csv", columns=["a", "b"], header_comment="note")
        assert path.read_text() == "# note\na,b\n0.1,0.333333333333\n"

    def test_dataframe_input_matches_format(self, temp_output_dir):
        frame = pd.DataFrame({"s": [0.0, 0.5], "x": [1.0, 2.25]})
        path = write_csv(frame, temp_output_dir / "f.csv")
        assert path.read_text() == format_csv(frame)

    def test_columns_required(self, temp_output_dir):
        with pytest.raises(InvalidInputError):
            write_csv(pd.DataFrame(), temp_output_dir / "empty.csv")
