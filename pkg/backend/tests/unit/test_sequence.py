# Unit Tests for the Epsilon Sequence
# File: test_sequence.py
# Author: Transport Toolkit Team
# Date: 2026-10-14
# Purpose: Schedule validation, ledger layout and behaviour of gamma_eps as epsilon decreases

import numpy as np
import pytest

from app.core.exceptions import InvalidInputError
from app.heisenberg.group import Point
from app.measures.atomic import AtomicMeasure
from app.measures.sampled import Box, uniform_box
from app.services.pipeline_service import default_target
from app.solvers.sequence import LEDGER_COLUMNS, run_approximation_sequence


@pytest.fixture
def unit_source():
    return uniform_box(Box(lower=(0.0, 0.0, 0.0), upper=(1.0, 1.0, 1.0)))


class TestSchedule:
    @pytest.mark.parametrize("epsilons", [[], [0.1, 0.2], [0.2, 0.2], [0.5, 0.0], [0.5, -0.1]])
    def test_rejects_bad_schedules(self, unit_source, epsilons):
        with pytest.raises(InvalidInputError):
            run_approximation_sequence(unit_source, default_target(), epsilons=epsilons, N=20)

    def test_dimension_mismatch(self, unit_source):
        with pytest.raises(InvalidInputError):
            run_approximation_sequence(unit_source, default_target(n=2), epsilons=[0.1], N=20)


class TestLedger:
    """One row per epsilon and a closing W1 row"""

    def test_columns_and_rows(self, pipeline_run):
        _, _, result = pipeline_run
        ledger = result.ledger()
        assert list(ledger.columns) == LEDGER_COLUMNS
        assert len(ledger) == len(result.steps) + 1
        last = ledger.iloc[-1]
        assert last["label"] == "W1"
        assert last["epsilon"] == 0.0
        assert last["int_d"] == pytest.approx(result.w1)

    def test_rows_follow_schedule(self, pipeline_run):
        _, _, result = pipeline_run
        assert [s.epsilon for s in result.steps] == [0.5, 0.2, 0.1, 0.05, 0.02]
        assert result.source.size == 400


class TestConvergence:
    """Behaviour of gamma_eps on the default instance"""

    def test_gap_nonnegative_and_nonincreasing(self, pipeline_run):
        _, _, result = pipeline_run
        gaps = np.array([s.w1_gap for s in result.steps])
        assert np.all(gaps >= -1e-6)
        assert np.all(np.diff(gaps) <= 1e-6)

    def test_plans_keep_source_marginal(self, pipeline_run):
        _, _, result = pipeline_run
        for step in result.steps:
            assert step.plan.source_marginal() == pytest.approx(result.source.weight_array())

    def test_final_plan_is_nearly_a_map(self, pipeline_run):
        _, _, result = pipeline_run
        assert result.steps[-1].dispersion < 0.05
        dispersions = [s.dispersion for s in result.steps]
        assert all(b <= a + 1e-6 for a, b in zip(dispersions, dispersions[1:]))

    def test_single_atom_target_has_no_dispersion(self, unit_source):
        nu = AtomicMeasure.dirac(Point.from_array([0.5, 0.5, 0.5]))
        result = run_approximation_sequence(unit_source, nu, epsilons=[0.5, 0.1], N=50, seed=1)
        assert result.ledger()["dispersion"].iloc[:-1].tolist() == pytest.approx([0.0, 0.0], abs=1e-12)
        assert all(s.w1_gap == pytest.approx(0.0, abs=1e-12) for s in result.steps)

    def test_threads_match_serial(self, unit_source):
        nu = default_target()
        serial = run_approximation_sequence(unit_source, nu, epsilons=[0.5, 0.1], N=60, seed=3)
        threaded = run_approximation_sequence(unit_source, nu, epsilons=[0.5, 0.1], N=60, seed=3, workers=2)
        assert serial.ledger().equals(threaded.ledger())
