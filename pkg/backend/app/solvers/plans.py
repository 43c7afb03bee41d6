# Transport Plans
# File: plans.py
# Author: Transport Toolkit Team
# Date: 2026-10-06
# Purpose: Sparse couplings between atomic measures and Kantorovich dual potentials

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, model_validator
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from app.core.config import settings
from app.measures.atomic import AtomicMeasure

Entry = Tuple[int, int, float]


class TransportPlan(BaseModel):
    """
    Coupling gamma in Pi(source, target) stored as (i, j, mass) entries.

    Serialises as {"source": ..., "target": ..., "entries": [[i, j, mass], ...]}.
    """

    source: AtomicMeasure
    target: AtomicMeasure
    entries: List[Entry]

    @model_validator(mode="after")
    def _check_marginals(self) -> "TransportPlan":
        if not self.entries:
            raise ValueError("a transport plan needs at least one entry")
        if self.source.n != self.target.n:
            raise ValueError("source and target live in different groups")
        rows, cols, mass = self._columns()
        if rows.min() < 0 or rows.max() >= self.source.size or cols.min() < 0 or cols.max() >= self.target.size:
            raise ValueError("plan entry index out of range")
        if not np.all(np.isfinite(mass)) or np.any(mass <= 0):
            raise ValueError("plan masses must be finite and positive")
        tol = settings.MARGINAL_TOLERANCE
        row_err = np.abs(np.bincount(rows, mass, self.source.size) - self.source.weight_array()).max()
        col_err = np.abs(np.bincount(cols, mass, self.target.size) - self.target.weight_array()).max()
        if row_err > tol or col_err > tol:
            raise ValueError(f"plan marginals off by {max(row_err, col_err):.3g} (tolerance {tol:g})")
        return self

    def _columns(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        arr = np.asarray(self.entries, dtype=float).reshape(-1, 3)
        return arr[:, 0].astype(int), arr[:, 1].astype(int), arr[:, 2]

    @property
    def rows(self) -> np.ndarray:
        return self._columns()[0]

    @property
    def cols(self) -> np.ndarray:
        return self._columns()[1]

    @property
    def masses(self) -> np.ndarray:
        return self._columns()[2]

    @property
    def size(self) -> int:
        return len(self.entries)

    def matrix(self) -> np.ndarray:
        """Dense coupling matrix of shape (len(source), len(target))"""
        rows, cols, mass = self._columns()
        out = np.zeros((self.source.size, self.target.size))
        np.add.at(out, (rows, cols), mass)
        return out

    def source_marginal(self) -> np.ndarray:
        rows, _, mass = self._columns()
        return np.bincount(rows, mass, self.source.size)

    def target_marginal(self) -> np.ndarray:
        _, cols, mass = self._columns()
        return np.bincount(cols, mass, self.target.size)

    def pair_coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Coordinates (x_i, y_j) for every entry, each of shape (entries, 2n+1)"""
        rows, cols, _ = self._columns()
        return self.source.coordinates()[rows], self.target.coordinates()[cols]

    def is_basic(self) -> bool:
        """True when the support graph is a forest with at most |source| + |target| - 1 edges"""
        rows, cols, _ = self._columns()
        m, k = self.source.size, self.target.size
        if rows.size > m + k - 1:
            return False
        graph = coo_matrix((np.ones(rows.size), (rows, m + cols)), shape=(m + k, m + k))
        components, _ = connected_components(graph, directed=False)
        return rows.size == m + k - components

    def pushed_target(self) -> AtomicMeasure:
        """(pi_2)#gamma restricted to target atoms that carry mass"""
        mass = self.target_marginal()
        keep = mass > 0
        return AtomicMeasure.from_arrays(self.target.coordinates()[keep], mass[keep], normalize=True, merge=False)

    @classmethod
    def from_matrix(
        cls,
        source: AtomicMeasure,
        target: AtomicMeasure,
        gamma: np.ndarray,
        floor: Optional[float] = None,
    ) -> "TransportPlan":
        """Sparse plan from a dense coupling, dropping masses at or below floor"""
        floor = settings.PLAN_MASS_FLOOR if floor is None else floor
        rows, cols = np.nonzero(gamma > floor)
        entries = [(int(i), int(j), float(gamma[i, j])) for i, j in zip(rows, cols)]
        return cls(source=source, target=target, entries=entries)

    @classmethod
    def product(cls, source: AtomicMeasure, target: AtomicMeasure) -> "TransportPlan":
        """source x target"""
        return cls.from_matrix(source, target, np.outer(source.weight_array(), target.weight_array()), floor=0.0)


class DualPotential(BaseModel):
    """
    Kantorovich potentials psi on source atoms and psi^c on target atoms.

    For the distance cost the source potential is the 1-Lipschitz u, and
    u(y_j) = -psi_c[j] extends it to the target atoms.
    """

    psi: List[float]
    psi_c: List[float]

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.psi, dtype=float), np.asarray(self.psi_c, dtype=float)

    def dual_value(self, source: AtomicMeasure, target: AtomicMeasure) -> float:
        psi, psi_c = self.arrays()
        return float(psi @ source.weight_array() + psi_c @ target.weight_array())

    def feasibility_violation(self, cost: np.ndarray) -> float:
        """max(psi_i + psi_c_j - c_ij, 0) over all pairs"""
        psi, psi_c = self.arrays()
        return float(max(0.0, (psi[:, None] + psi_c[None, :] - cost).max()))

    def slackness_violation(self, cost: np.ndarray, plan: TransportPlan) -> float:
        """max |c_ij - psi_i - psi_c_j| over plan entries"""
        psi, psi_c = self.arrays()
        rows, cols = plan.rows, plan.cols
        return float(np.abs(cost[rows, cols] - psi[rows] - psi_c[cols]).max())

    def source_values(self) -> np.ndarray:
        return np.asarray(self.psi, dtype=float)

    def target_values(self) -> np.ndarray:
        """u on target atoms, -psi_c"""
        return -np.asarray(self.psi_c, dtype=float)
