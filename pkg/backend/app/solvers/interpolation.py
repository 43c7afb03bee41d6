# Displacement Interpolation
# File: interpolation.py
# Author: Transport Toolkit Team
# Date: 2026-10-07
# Purpose: Push plans along minimal curves and read transport maps off plans

from typing import List, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from app.core.exceptions import InvalidInputError
from app.heisenberg.geodesics import eval_curve_arrays
from app.heisenberg.group import Point
from app.measures.atomic import AtomicMeasure
from app.solvers.plans import TransportPlan


def interpolate(gamma: TransportPlan, t: float) -> AtomicMeasure:
    """
    (e_t o S)#gamma: mass gamma_ij placed at eval_curve(x_i, y_j, t).

    Coincident images are merged; the result is renormalised to total mass 1.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError(f"interpolation time must lie in [0, 1], got {t}")
    xs, ys = gamma.pair_coordinates()
    points = eval_curve_arrays(xs, ys, t)
    return AtomicMeasure.from_arrays(points, gamma.masses, normalize=True, merge=True)


class SplitAtom(BaseModel):
    """A source atom whose mass goes to several targets"""

    source: int
    weight: float
    distribution: List[Tuple[int, float]] = Field(description="(target index, mass) pairs")


class SplitReport(BaseModel):
    split_atoms: List[SplitAtom]
    split_mass: float = Field(description="Mass of source atoms that split")
    tolerance: float


class TransportMap(BaseModel):
    """Source index -> target atom read off a plan"""

    assignments: List[int]
    targets: List[Point]
    tolerance: float

    def image(self, i: int) -> Point:
        return self.targets[i]


def transport_map_extract(gamma: TransportPlan, tol: float = 1e-9) -> Union[TransportMap, SplitReport]:
    """
    The map induced by gamma when each source atom sends at least (1 - tol)
    of its mass to one target (the lowest index among ties); otherwise the
    list of atoms that split.
    """
    matrix = gamma.matrix()
    weights = gamma.source.weight_array()
    dominant = np.argmax(matrix, axis=1)
    share = matrix[np.arange(matrix.shape[0]), dominant] / np.where(weights > 0, weights, 1.0)
    split = np.nonzero((weights > 0) & (share < 1.0 - tol))[0]
    if split.size == 0:
        targets = gamma.target.atoms
        return TransportMap(
            assignments=dominant.tolist(),
            targets=[targets[j] for j in dominant],
            tolerance=tol,
        )

    atoms = []
    for i in split:
        cols = np.nonzero(matrix[i] > 0)[0]
        atoms.append(
            SplitAtom(
                source=int(i),
                weight=float(weights[i]),
                distribution=[(int(j), float(matrix[i, j])) for j in cols],
            )
        )
    return SplitReport(split_atoms=atoms, split_mass=float(weights[split].sum()), tolerance=tol)
