# Unit Tests for Interpolation
# File: test_interpolation.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Displacement interpolation and transport map extraction

import numpy as np
import pytest

from app.core.exceptions import InvalidInputError
from app.heisenberg.group import Point
from app.measures.atomic import AtomicMeasure
from app.solvers.interpolation import SplitReport, TransportMap, interpolate, transport_map_extract
from app.solvers.kantorovich import solve_kantorovich
from app.solvers.plans import TransportPlan


def _sorted(measure: AtomicMeasure) -> np.ndarray:
    coords = measure.coordinates()
    return coords[np.lexsort(coords.T[::-1])]


class TestInterpolate:
    """(e_t o S)#gamma"""

    def test_endpoints_are_marginals(self, small_measures):
        mu, nu = small_measures
        plan, _, _ = solve_kantorovich(mu, nu)
        assert np.allclose(_sorted(interpolate(plan, 0.0)), _sorted(mu))
        assert np.allclose(_sorted(interpolate(plan, 1.0)), _sorted(nu))

    def test_single_pair_midpoint(self, origin):
        plan = TransportPlan(
            source=AtomicMeasure.dirac(origin),
            target=AtomicMeasure.dirac(Point.from_array([1.0, 0.0, 0.0])),
            entries=[(0, 0, 1.0)],
        )
        mid = interpolate(plan, 0.5)
        assert mid.size == 1
        assert np.allclose(mid.coordinates(), [[0.5, 0.0, 0.0]])

    def test_mass_preserved(self, weighted_measures):
        mu, nu = weighted_measures
        plan, _, _ = solve_kantorovich(mu, nu)
        assert interpolate(plan, 0.3).weight_array().sum() == pytest.approx(1.0)

    def test_time_out_of_range(self, small_measures):
        mu, nu = small_measures
        plan, _, _ = solve_kantorovich(mu, nu)
        with pytest.raises(InvalidInputError):
            interpolate(plan, 1.2)


class TestTransportMap:
    """Maps read off plans"""

    def test_permutation_plan(self, small_measures):
        mu, nu = small_measures
        plan, _, _ = solve_kantorovich(mu, nu)
        result = transport_map_extract(plan)
        assert isinstance(result, TransportMap)
        assert sorted(result.assignments) == list(range(nu.size))
        i = 0
        assert result.image(i) == nu.atoms[result.assignments[i]]

    def test_dirac_source_splits(self, origin):
        nu = AtomicMeasure.from_arrays(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
        plan, _, _ = solve_kantorovich(AtomicMeasure.dirac(origin), nu)
        result = transport_map_extract(plan)
        assert isinstance(result, SplitReport)
        assert result.split_mass == pytest.approx(1.0)
        assert result.split_atoms[0].source == 0
        assert len(result.split_atoms[0].distribution) == 2
