# Unit Tests for Plan Diagnostics
# File: test_plan_checks.py
# Author: Transport Toolkit Team
# Date: 2026-10-13
# Purpose: Cyclical monotonicity, monotone rays, Omega support, potentials and injectivity

import numpy as np
import pytest

from app.core.exceptions import InvalidInputError
from app.heisenberg.group import Point, mul_arrays
from app.measures.atomic import AtomicMeasure
from app.diagnostics.plan_checks import (
    check_cyclical_monotonicity,
    check_interpolation_injectivity,
    check_monotone_rays,
    check_plan_on_omega,
    check_potential_lipschitz_and_gradient,
    graph_dispersion,
)
from app.solvers.kantorovich import solve_kantorovich
from app.solvers.plans import DualPotential, TransportPlan
from app.solvers.secondary import solve_secondary


def _line(*xs: float) -> AtomicMeasure:
    return AtomicMeasure.from_arrays(np.array([[x, 0.0, 0.0] for x in xs]))


class TestCyclicalMonotonicity:
    """Optimal plans have no improving cycles"""

    def test_optimal_plan_passes(self, weighted_measures):
        mu, nu = weighted_measures
        plan, _, _ = solve_kantorovich(mu, nu)
        report = check_cyclical_monotonicity(plan, max_cycle=4, seed=1)
        assert report.passed
        assert report.trials > 0

    def test_swapped_plan_fails(self):
        mu, nu = _line(0.0, 1.0), _line(0.1, 1.1)
        swapped = TransportPlan(source=mu, target=nu, entries=[(0, 1, 0.5), (1, 0, 0.5)])
        report = check_cyclical_monotonicity(swapped)
        assert not report.passed
        assert report.violations == 1
        assert report.worst_violation == pytest.approx(1.8)

    def test_single_entry_is_trivially_monotone(self, origin):
        plan, _, _ = solve_kantorovich(AtomicMeasure.dirac(origin), _line(1.0))
        report = check_cyclical_monotonicity(plan)
        assert report.passed
        assert report.trials == 0

    def test_cost_matrix_argument(self):
        mu, nu = _line(0.0, 1.0), _line(0.1, 1.1)
        swapped = TransportPlan(source=mu, target=nu, entries=[(0, 1, 0.5), (1, 0, 0.5)])
        flat = np.zeros((2, 2))
        assert check_cyclical_monotonicity(swapped, cost=flat).passed

    def test_cycle_length_limits(self, small_measures):
        mu, nu = small_measures
        plan, _, _ = solve_kantorovich(mu, nu)
        with pytest.raises(InvalidInputError):
            check_cyclical_monotonicity(plan, max_cycle=5)


class TestMonotoneRays:
    """Pairs on a shared ray keep their order"""

    def test_collinear_monotone_plan(self):
        mu, nu = _line(0.0, 1.0), _line(2.0, 3.0)
        plan = TransportPlan(source=mu, target=nu, entries=[(0, 0, 0.5), (1, 1, 0.5)])
        report = check_monotone_rays(plan)
        assert report.passed
        assert report.details["incidences"] >= 1

    def test_crossing_plan_fails(self):
        mu, nu = _line(0.0, 1.0), _line(2.0, 3.0)
        plan = TransportPlan(source=mu, target=nu, entries=[(0, 1, 0.5), (1, 0, 0.5)])
        report = check_monotone_rays(plan)
        assert not report.passed

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_secondary_plan_on_a_translated_line(self, seed):
        """Atoms on a left-translated horizontal line force incidences; the secondary plan keeps their order"""
        rng = np.random.default_rng(seed)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        g = rng.normal(size=3)

        def on_line(s):
            return mul_arrays(g, np.column_stack([s * np.cos(theta), s * np.sin(theta), np.zeros_like(s)]))

        mu = AtomicMeasure.from_arrays(on_line(rng.uniform(0.0, 1.0, 6)))
        nu = AtomicMeasure.from_arrays(on_line(rng.uniform(1.2, 2.5, 6)))
        report = check_monotone_rays(solve_secondary(mu, nu))
        assert report.details["incidences"] >= 5
        assert report.violations == 0
        assert "vacuous" not in report.details

    def test_no_incidences_is_vacuous(self):
        mu = AtomicMeasure.from_arrays(np.array([[0.0, 0.0, 0.0], [0.0, 5.0, 0.0]]))
        nu = AtomicMeasure.from_arrays(np.array([[1.0, 0.0, 0.0], [1.0, 5.0, 0.0]]))
        plan = TransportPlan(source=mu, target=nu, entries=[(0, 0, 0.5), (1, 1, 0.5)])
        report = check_monotone_rays(plan)
        assert report.passed
        assert report.details["vacuous"] is True


class TestPlanOnOmega:
    def test_center_line_entry_flagged(self, origin):
        plan = TransportPlan(
            source=AtomicMeasure.dirac(origin),
            target=AtomicMeasure.dirac(Point.from_array([0.0, 0.0, 1.0])),
            entries=[(0, 0, 1.0)],
        )
        report = check_plan_on_omega(plan)
        assert not report.passed
        assert report.details["center_mass"] == pytest.approx(1.0)

    def test_diagonal_entries_ignored(self, origin):
        dirac = AtomicMeasure.dirac(origin)
        report = check_plan_on_omega(TransportPlan(source=dirac, target=dirac, entries=[(0, 0, 1.0)]))
        assert report.passed
        assert report.details["diagonal_mass"] == pytest.approx(1.0)

    def test_generic_plan(self, small_measures):
        plan, _, _ = solve_kantorovich(*small_measures)
        assert check_plan_on_omega(plan).passed


class TestPotential:
    """Kantorovich potentials of the distance cost"""

    def test_solver_potential_passes(self, weighted_measures):
        mu, nu = weighted_measures
        plan, potential, _ = solve_kantorovich(mu, nu)
        report = check_potential_lipschitz_and_gradient(potential, plan, gradient=False)
        assert report.passed
        assert report.details["equality_worst"] <= 1e-9

    def test_scaled_potential_fails(self, weighted_measures):
        mu, nu = weighted_measures
        plan, potential, _ = solve_kantorovich(mu, nu)
        psi, psi_c = potential.arrays()
        scaled = DualPotential(psi=(2 * psi).tolist(), psi_c=(2 * psi_c).tolist())
        report = check_potential_lipschitz_and_gradient(scaled, plan, gradient=False)
        assert not report.passed

    def test_gradient_details_reported(self, rng):
        mu = AtomicMeasure.from_arrays(rng.uniform(0, 1, size=(30, 3)))
        nu = AtomicMeasure.from_arrays(rng.uniform(2, 3, size=(30, 3)))
        plan, potential, _ = solve_kantorovich(mu, nu)
        report = check_potential_lipschitz_and_gradient(potential, plan, cosine_floor=-1.0)
        assert report.passed
        assert report.details["gradient_entries"] > 0


class TestGraphs:
    """Dispersion and injectivity"""

    def test_dispersion(self, small_measures, origin):
        plan, _, _ = solve_kantorovich(*small_measures)
        assert graph_dispersion(plan) == pytest.approx(0.0, abs=1e-12)
        split, _, _ = solve_kantorovich(AtomicMeasure.dirac(origin), _line(1.0, 2.0))
        assert graph_dispersion(split) == pytest.approx(0.5)

    def test_injectivity(self, small_measures):
        plan, _, _ = solve_kantorovich(*small_measures)
        report = check_interpolation_injectivity(plan, 0.5)
        assert report.passed
        assert report.details["collisions"] == 0

    def test_injectivity_time_range(self, small_measures):
        plan, _, _ = solve_kantorovich(*small_measures)
        with pytest.raises(InvalidInputError):
            check_interpolation_injectivity(plan, 1.0)
