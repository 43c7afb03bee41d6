# Quantization Nets
# File: quantization.py
# Author: Transport Toolkit Team
# Date: 2026-10-05
# Purpose: Greedy 1/m-nets over point clouds and push-forward of measures onto them

from typing import List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.exceptions import CoverageError, InvalidInputError
from app.heisenberg.distance import distance_matrix, distances_from
from app.heisenberg.group import Point, as_stack
from app.measures.atomic import AtomicMeasure
from app.utils.logger import setup_logger

logger = setup_logger(__name__)


class QuantizationMap(BaseModel):
    """
    Projection p_m onto a greedy net F_m.

    Attributes:
        m: Resolution index; net points are at least 1/m apart
        net_indices: Positions of the net points inside the quantized input
        net_points: Coordinates of F_m, shape (k, 2n+1)
        assignments: Net index assigned to every input point
        assignment_distances: d(p_m(x), x) for every input point
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m: int = Field(ge=1)
    net_indices: List[int]
    net_points: np.ndarray
    assignments: List[int]
    assignment_distances: List[float]

    @property
    def scale(self) -> float:
        return 1.0 / self.m

    @property
    def size(self) -> int:
        return len(self.net_indices)

    @property
    def covering_radius(self) -> float:
        """Largest distance from an input point to its net point"""
        return max(self.assignment_distances)

    @property
    def net(self) -> AtomicMeasure:
        """F_m carrying the share of input points assigned to each net point"""
        counts = np.bincount(np.asarray(self.assignments), minlength=self.size).astype(float)
        return AtomicMeasure.from_arrays(self.net_points, counts / counts.sum(), merge=False)

    def assign(self, point: Union[Point, np.ndarray]) -> int:
        """
        p_m for an arbitrary point: the first net point closer than 1/m.

        Raises:
            CoverageError: if no net point lies within 1/m
        """
        return int(self.assign_many(as_stack(point))[0])

    def assign_many(self, points: Union[np.ndarray, Sequence[Point]]) -> np.ndarray:
        """
        Vectorised assign, the rule quantize uses: lowest net index within 1/m.

        Distances are measured from the net points, as quantize measures them.
        """
        dist = distance_matrix(self.net_points, points).T
        covered = dist < self.scale
        outside = ~covered.any(axis=1)
        if np.any(outside):
            raise CoverageError(
                f"{int(outside.sum())} points lie outside coverage radius {self.scale:.6g} "
                f"(farthest at {dist[outside].min(axis=1).max():.6g})"
            )
        return np.argmax(covered, axis=1)


def quantize(points: Union[np.ndarray, Sequence[Point]], m: int) -> QuantizationMap:
    """
    Greedy 1/m-net over the input points in input order.

    A point joins the net iff it lies at distance >= 1/m from every earlier net
    point; every other point is assigned to the first net point closer than 1/m.
    """
    if m < 1:
        raise InvalidInputError(f"quantization index must be at least 1, got {m}")
    if len(points) == 0:
        raise InvalidInputError("cannot quantize an empty point set")
    coords = as_stack(points)

    radius = 1.0 / m
    k = coords.shape[0]
    # distance of every point to the current net and the first net point that covers it
    nearest = np.full(k, np.inf)
    owner = np.full(k, -1, dtype=int)
    net_indices: List[int] = []

    for i in range(k):
        if owner[i] >= 0:
            continue
        net_indices.append(i)
        label = len(net_indices) - 1
        dist = distances_from(coords[i], coords)
        dist[i] = 0.0
        newly = (owner < 0) & (dist < radius)
        owner[newly] = label
        nearest[newly] = dist[newly]

    net_points = coords[net_indices]
    logger.debug(f"Quantized {k} points at m={m}: net size {len(net_indices)}")
    return QuantizationMap(
        m=m,
        net_indices=net_indices,
        net_points=net_points,
        assignments=owner.tolist(),
        assignment_distances=nearest.tolist(),
    )


def pushforward_quantize(
    nu: Union[AtomicMeasure, np.ndarray, Sequence[Point]],
    q: QuantizationMap,
) -> AtomicMeasure:
    """
    (p_m)#nu.

    A sample cloud is read as its empirical measure. Atoms go to the first net
    point within 1/m, the rule quantize uses, so pushing the quantized cloud
    forward reproduces q.net.

    Raises:
        CoverageError: if some atom is not within 1/m of the net
    """
    if isinstance(nu, AtomicMeasure):
        coords, weights = nu.coordinates(), nu.weight_array()
    else:
        coords = as_stack(nu)
        weights = np.full(coords.shape[0], 1.0 / coords.shape[0])
    idx = q.assign_many(coords)
    mass = np.zeros(q.size)
    np.add.at(mass, idx, weights)
    keep = mass > 0
    return AtomicMeasure.from_arrays(q.net_points[keep], mass[keep] / mass[keep].sum(), merge=False)
