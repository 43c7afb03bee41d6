# Unit Tests for Quantization Nets
# File: test_quantization.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Greedy nets, projections and push-forwards onto nets

import numpy as np
import pytest

from app.core.exceptions import CoverageError, InvalidInputError
from app.heisenberg.distance import distance_matrix
from app.heisenberg.group import Point
from app.measures.atomic import AtomicMeasure
from app.measures.quantization import pushforward_quantize, quantize
from app.solvers.kantorovich import w1


class TestQuantize:
    """Greedy 1/m-nets"""

    def test_single_point(self):
        q = quantize(np.array([[0.2, 0.1, 0.3]]), 4)
        assert q.size == 1
        assert q.assignments == [0]
        assert q.covering_radius == 0.0

    def test_far_points_both_kept(self):
        """Two points at distance 3 stay separate for m = 1"""
        q = quantize(np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]]), 1)
        assert q.size == 2
        assert q.net_indices == [0, 1]

    def test_close_points_merge(self):
        q = quantize(np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]]), 1)
        assert q.size == 1
        assert q.assignments == [0, 0]
        assert q.assignment_distances[1] == pytest.approx(0.5)

    def test_net_properties(self, rng):
        """Net points are 1/m-separated and every point is within 1/m"""
        points = rng.uniform(-1, 1, size=(80, 3))
        q = quantize(points, 3)
        D = distance_matrix(q.net_points, q.net_points)
        off_diagonal = D[~np.eye(q.size, dtype=bool)]
        assert np.all(off_diagonal >= q.scale)
        assert q.covering_radius < q.scale
        # first point always opens the net
        assert q.net_indices[0] == 0

    def test_finer_nets_are_larger(self, rng):
        points = rng.uniform(-1, 1, size=(60, 3))
        assert quantize(points, 1).size <= quantize(points, 4).size

    def test_net_measure_counts_assignments(self):
        points = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0], [5.0, 0.0, 0.0]])
        net = quantize(points, 1).net
        assert np.allclose(net.weight_array(), [2.0 / 3.0, 1.0 / 3.0])

    @pytest.mark.parametrize("m", [0, -2])
    def test_invalid_index(self, m):
        with pytest.raises(InvalidInputError):
            quantize(np.zeros((1, 3)), m)

    def test_empty_input(self):
        with pytest.raises(InvalidInputError):
            quantize(np.zeros((0, 3)), 1)


class TestProjection:
    """p_m and (p_m)#nu"""

    def test_assign_outside_coverage(self):
        q = quantize(np.array([[0.0, 0.0, 0.0]]), 2)
        assert q.assign(Point.from_array([0.1, 0.0, 0.0])) == 0
        with pytest.raises(CoverageError):
            q.assign(Point.from_array([2.0, 0.0, 0.0]))
        with pytest.raises(CoverageError):
            q.assign_many(np.array([[0.1, 0.0, 0.0], [2.0, 0.0, 0.0]]))

    def test_pushforward_of_net_measure_is_unchanged(self, rng):
        points = rng.uniform(-1, 1, size=(30, 3))
        q = quantize(points, 2)
        net = q.net
        pushed = pushforward_quantize(net, q)
        assert np.allclose(pushed.coordinates(), net.coordinates())
        assert np.allclose(pushed.weight_array(), net.weight_array())

    def test_pushforward_of_dirac(self):
        p = Point.from_array([0.3, -0.2, 0.1])
        q = quantize(np.array([[0.0, 0.0, 0.0], [0.3, -0.2, 0.1]]), 1)
        pushed = pushforward_quantize(AtomicMeasure.dirac(p), q)
        assert pushed.size == 1
        assert pushed.weights == [1.0]

    def test_pushforward_of_sample_cloud(self, rng):
        points = rng.uniform(-1, 1, size=(40, 3))
        q = quantize(points, 2)
        pushed = pushforward_quantize(points, q)
        assert pushed.weight_array().sum() == pytest.approx(1.0)
        assert pushed.size <= q.size

    def test_first_covering_net_point_wins(self):
        """[0.45, 0] is nearer the second net point but the first one covers it"""
        points = np.array([[0.0, 0.0, 0.0], [0.6, 0.0, 0.0], [0.45, 0.0, 0.0]])
        q = quantize(points, 2)
        assert q.net_indices == [0, 1]
        assert q.assignments == [0, 1, 0]
        assert q.assign(Point.from_array([0.45, 0.0, 0.0])) == 0
        pushed = pushforward_quantize(points, q)
        assert pushed.weight_array() == pytest.approx([2.0 / 3.0, 1.0 / 3.0])

    @pytest.mark.parametrize("m", [1, 2, 4, 8])
    def test_pushforward_agrees_with_quantize(self, rng, m):
        points = rng.uniform(-1, 1, size=(200, 3))
        q = quantize(points, m)
        assert q.assign_many(points).tolist() == q.assignments
        counts = np.bincount(q.assignments, minlength=q.size).astype(float)
        pushed = pushforward_quantize(points, q)
        assert np.allclose(pushed.coordinates(), q.net_points[counts > 0])
        assert pushed.weight_array() == pytest.approx(counts[counts > 0] / counts.sum(), abs=1e-15)

    def test_pushforward_moves_little(self, rng):
        """W1(nu, (p_m)#nu) <= 1/m"""
        points = rng.uniform(-1, 1, size=(25, 3))
        nu = AtomicMeasure.from_arrays(points)
        for m in (1, 2, 4):
            q = quantize(points, m)
            assert w1(nu, pushforward_quantize(nu, q)) <= q.scale + 1e-12
