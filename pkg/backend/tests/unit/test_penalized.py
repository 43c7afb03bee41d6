# Unit Tests for the Penalized Problems
# File: test_penalized.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: c_eps, the C_eps functional, candidate supports and the (P_eps) search

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import InvalidInputError
from app.heisenberg.group import Point
from app.measures.atomic import AtomicMeasure
from app.measures.sampled import Box
from app.solvers.kantorovich import solve_kantorovich
from app.solvers.penalized import (
    CepsConfig,
    c_eps_cost,
    c_eps_matrix,
    candidate_supports,
    evaluate_C_eps,
    reweight_support,
    solve_P_eps,
)


@pytest.fixture
def clustered_target():
    """Three well separated atoms"""
    coords = np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 3.0, 0.0]])
    return AtomicMeasure.from_arrays(coords, [0.5, 0.3, 0.2])


class TestCost:
    """c_eps(x, y) = d + eps d^2"""

    def test_examples(self, origin):
        assert c_eps_cost(0.3, origin, origin) == 0.0
        assert c_eps_cost(1.0, origin, Point.from_array([1.0, 0.0, 0.0])) == pytest.approx(2.0)
        assert np.allclose(c_eps_matrix(0.5, np.array([[0.0, 2.0]])), [[0.0, 4.0]])

    def test_nonpositive_epsilon(self, origin):
        with pytest.raises(InvalidInputError):
            c_eps_cost(0.0, origin, origin)
        with pytest.raises(ValidationError):
            CepsConfig(epsilon=-1.0)

    def test_default_exponent(self):
        cfg = CepsConfig(epsilon=0.1)
        assert cfg.exponent(1) == 14.0
        assert cfg.exponent(2) == 20.0
        assert CepsConfig(epsilon=0.1, cardinality_exponent=3.0).exponent(1) == 3.0


class TestEvaluate:
    """Four-term breakdown of C_eps"""

    def test_plan_onto_target_has_no_w1_term(self, small_measures):
        mu, nu = small_measures
        plan, _, value = solve_kantorovich(mu, nu)
        b = evaluate_C_eps(CepsConfig(epsilon=0.2), plan, nu)
        assert b.w1_to_target == pytest.approx(0.0, abs=1e-12)
        assert b.d_cost == pytest.approx(value, rel=1e-10)
        assert b.cardinality == nu.size
        assert b.total == pytest.approx(b.w1_term + b.d_cost + b.quadratic_term + b.cardinality_term)

    def test_dirac_to_itself(self, origin):
        """Only the cardinality term survives: C_eps = eps^14"""
        dirac = AtomicMeasure.dirac(origin)
        plan, _, _ = solve_kantorovich(dirac, dirac)
        b = evaluate_C_eps(CepsConfig(epsilon=0.5), plan, dirac)
        assert b.total == pytest.approx(0.5 ** 14)

    def test_marginal_outside_box(self, small_measures):
        mu, nu = small_measures
        plan, _, _ = solve_kantorovich(mu, nu)
        tiny = Box(lower=(10.0, 10.0, 10.0), upper=(11.0, 11.0, 11.0))
        with pytest.raises(InvalidInputError):
            evaluate_C_eps(CepsConfig(epsilon=0.2, box=tiny), plan, nu)


class TestCandidates:
    """Search family of second marginals"""

    def test_separated_target_is_its_own_net(self, clustered_target):
        cfg = CepsConfig(epsilon=0.1, quantization_schedule=[1, 2])
        family = candidate_supports(cfg, clustered_target)
        assert [label for label, _, _ in family] == ["m=1"]
        assert family[0][1].tolist() == [0, 1, 2]

    def test_coarse_net_then_full_target(self):
        nu = AtomicMeasure.from_arrays(np.array([[0.0, 0.0, 0.0], [0.2, 0.0, 0.0], [3.0, 0.0, 0.0]]))
        family = candidate_supports(CepsConfig(epsilon=0.1, quantization_schedule=[1]), nu)
        assert [label for label, _, _ in family] == ["m=1", "nu"]
        _, support, mass = family[0]
        assert support.tolist() == [0, 2]
        assert np.allclose(mass, [2.0 / 3.0, 1.0 / 3.0])

    def test_reweight_on_single_atom(self, small_measures):
        mu, nu = small_measures
        plan = reweight_support(CepsConfig(epsilon=0.3), mu, nu, np.array([2]))
        assert plan.target.size == 1
        assert np.allclose(plan.target.coordinates(), nu.coordinates()[[2]])
        assert plan.source_marginal() == pytest.approx(mu.weight_array())


class TestSolvePeps:
    """Best candidate of the (P_eps) family"""

    def test_winner_has_lowest_score(self, rng, clustered_target):
        mu = AtomicMeasure.from_arrays(rng.uniform(-0.5, 3.5, size=(12, 3)))
        solution = solve_P_eps(CepsConfig(epsilon=0.1), mu, clustered_target)
        totals = [score for _, score in solution.candidates]
        assert solution.breakdown.total == pytest.approx(min(totals))
        assert solution.label in [label for label, _ in solution.candidates]
        assert solution.plan.source_marginal() == pytest.approx(mu.weight_array())

    def test_dirac_source_and_target(self, origin):
        dirac = AtomicMeasure.dirac(origin)
        solution = solve_P_eps(CepsConfig(epsilon=0.5), dirac, dirac)
        assert solution.breakdown.total == pytest.approx(0.5 ** 14)
        assert solution.breakdown.cardinality == 1

    def test_without_reweighting(self, small_measures):
        mu, nu = small_measures
        solution = solve_P_eps(CepsConfig(epsilon=0.2, reweighting=False), mu, nu)
        assert not any(label.endswith("+reweight") for label, _ in solution.candidates)

    def test_reweighting_doubles_family(self, small_measures):
        mu, nu = small_measures
        cfg = CepsConfig(epsilon=0.2, reweighting=True)
        solution = solve_P_eps(cfg, mu, nu)
        labels = [label for label, _ in solution.candidates]
        assert len(labels) == 2 * len(candidate_supports(cfg, nu))
        assert sum(label.endswith("+reweight") for label in labels) == len(labels) // 2
        assert solution.breakdown.total == pytest.approx(min(score for _, score in solution.candidates))

    def test_empty_schedule(self, small_measures):
        mu, nu = small_measures
        with pytest.raises(InvalidInputError):
            solve_P_eps(CepsConfig(epsilon=0.1, quantization_schedule=[]), mu, nu)

    def test_supports_outside_box(self, small_measures):
        mu, nu = small_measures
        box = Box(lower=(10.0, 10.0, 10.0), upper=(11.0, 11.0, 11.0))
        with pytest.raises(InvalidInputError):
            solve_P_eps(CepsConfig(epsilon=0.1, box=box), mu, nu)
