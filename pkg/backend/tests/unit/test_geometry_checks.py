# Unit Tests for Geometry Diagnostics
# File: test_geometry_checks.py
# Author: Transport Toolkit Team
# Date: 2026-10-13
# Purpose: Randomised geometry property reports, non-branching and ball scaling

from unittest.mock import patch

import numpy as np
import pytest

from app.diagnostics.geometry_checks import check_ball_scaling, check_geometry_properties, check_nonbranching
from app.heisenberg.geodesics import exp_geodesic_arrays
from app.heisenberg.group import mul_arrays
from app.diagnostics.reports import all_passed

EXPECTED_NAMES = [
    "group_associativity",
    "group_inverse",
    "triangle_inequality",
    "symmetry",
    "left_invariance",
    "dilation_homogeneity",
    "closed_form_distances",
    "log_exp_round_trip",
    "exp_log_round_trip",
    "constant_speed",
    "eikonal_analytic",
    "eikonal_finite_difference",
]


class TestGeometryProperties:
    """Group, metric and curve identities on random inputs"""

    def test_all_properties_hold(self):
        reports = check_geometry_properties(seed=7, triples=2000, round_trips=300, gradient_pairs=100)
        assert [r.name for r in reports] == EXPECTED_NAMES
        failing = [r.name for r in reports if not r.passed]
        assert failing == []

    def test_higher_group(self):
        reports = check_geometry_properties(seed=3, n=2, triples=500, round_trips=100, gradient_pairs=30)
        assert all_passed(reports)


class TestNonbranching:
    def test_no_branching_curves(self):
        report = check_nonbranching(trials=200, seed=5)
        assert report.passed
        assert report.trials + report.details["center_pairs_excluded"] == 200
        assert report.details["worst_continuation"] < 1e-6

    def test_default_run_passes(self):
        report = check_nonbranching()
        assert report.passed
        assert report.details["worst_continuation"] < 1e-8

    @pytest.mark.parametrize("phi", [2.08e-3, 5.46e-3, 1e-5])
    def test_nearly_straight_curves_continue(self, phi):
        """A t-error near 1e-12 must not read as a branching curve"""
        rng = np.random.default_rng(4)
        x = rng.normal(size=(50, 3))
        chi = rng.normal(size=(50, 1)) + 1j * rng.normal(size=(50, 1))
        y = mul_arrays(x, exp_geodesic_arrays(chi, np.full(50, phi), 1.0))
        with patch("app.diagnostics.geometry_checks._pairs_in_omega", return_value=(x, y, np.ones(50, dtype=bool))):
            report = check_nonbranching(trials=50, seed=0)
        assert report.passed
        assert report.trials == 50
        assert report.details["worst_continuation"] < 1e-9


class TestBallScaling:
    def test_ratio_matches_homogeneity(self):
        report = check_ball_scaling(samples=200_000, seed=2)
        assert report.statistical
        assert report.passed
        assert report.details["expected"] == 16.0
