# Atomic Measures
# File: atomic.py
# Author: Transport Toolkit Team
# Date: 2026-10-04
# Purpose: Finitely supported probability measures on H^n

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, model_validator
from scipy.sparse.csgraph import connected_components
from scipy.sparse import coo_matrix
from scipy.spatial import cKDTree

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.heisenberg.group import Point, as_stack


class AtomicMeasure(BaseModel):
    """
    Probability measure sum_i w_i delta_{x_i}.

    Serialises as {"atoms": [[coords], ...], "weights": [...]}.
    """

    atoms: List[Point]
    weights: List[float]

    @model_validator(mode="after")
    def _check_measure(self) -> "AtomicMeasure":
        if not self.atoms:
            raise ValueError("an atomic measure needs at least one atom")
        if len(self.atoms) != len(self.weights):
            raise ValueError(f"{len(self.atoms)} atoms but {len(self.weights)} weights")
        if len({p.n for p in self.atoms}) != 1:
            raise ValueError("all atoms must live in the same group H^n")
        w = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > settings.WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"weights sum to {w.sum():.15g}, expected 1")
        coords = np.asarray([p.coords for p in self.atoms], dtype=float)
        if len(coords) > 1 and cKDTree(coords).query_pairs(r=settings.ATOM_MERGE_TOLERANCE):
            raise ValueError("atomic measure has duplicate atoms")
        return self

    @property
    def n(self) -> int:
        return self.atoms[0].n

    @property
    def size(self) -> int:
        return len(self.atoms)

    def coordinates(self) -> np.ndarray:
        """Atom coordinates as an array of shape (k, 2n+1)"""
        return np.asarray([p.coords for p in self.atoms], dtype=float)

    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def support_size(self, floor: float = 0.0) -> int:
        """Number of atoms with weight above floor"""
        return int(np.count_nonzero(self.weight_array() > floor))

    @classmethod
    def from_arrays(
        cls,
        coords: Union[np.ndarray, Sequence[Point]],
        weights: Optional[Sequence[float]] = None,
        normalize: bool = False,
        merge: bool = True,
    ) -> "AtomicMeasure":
        """
        Build a measure from raw coordinates.

        Args:
            coords: Array (k, 2n+1) or sequence of points
            weights: Masses; uniform when omitted
            normalize: Rescale weights to total mass 1
            merge: Combine atoms closer than ATOM_MERGE_TOLERANCE
        """
        coords = as_stack(coords)
        if weights is None:
            w = np.full(coords.shape[0], 1.0 / coords.shape[0])
        else:
            w = np.asarray(weights, dtype=float)
        if w.shape[0] != coords.shape[0]:
            raise InvalidInputError(f"{coords.shape[0]} atoms but {w.shape[0]} weights")
        if normalize:
            total = w.sum()
            if not total > 0:
                raise InvalidInputError("cannot normalise a measure with zero mass")
            w = w / total
        if merge:
            coords, w = merge_atoms(coords, w)
        return cls(atoms=[Point.from_array(c) for c in coords], weights=w.tolist())

    @classmethod
    def dirac(cls, point: Point) -> "AtomicMeasure":
        return cls(atoms=[point], weights=[1.0])


def merge_atoms(
    coords: np.ndarray,
    weights: np.ndarray,
    tol: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Combine coincident atoms.

    Atoms linked by chains of pairs closer than tol form one cluster; the
    cluster keeps the coordinates of its first atom and the summed weight.
    Cluster order follows first appearance.
    """
    tol = settings.ATOM_MERGE_TOLERANCE if tol is None else tol
    coords = np.asarray(coords, dtype=float)
    weights = np.asarray(weights, dtype=float)
    k = coords.shape[0]
    if k < 2:
        return coords, weights
    pairs = cKDTree(coords).query_pairs(r=tol, output_type="ndarray")
    if len(pairs) == 0:
        return coords, weights
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(k, k))
    _, labels = connected_components(graph, directed=False)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    merged_weights = np.zeros(order.size)
    np.add.at(merged_weights, rank[inverse], weights)
    return coords[first[order]], merged_weights
