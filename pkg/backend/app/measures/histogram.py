# Density Histograms
# File: histogram.py
# Author: Transport Toolkit Team
# Date: 2026-10-05
# Purpose: Cubical-cell density estimates of atomic measures against Lebesgue (Haar) measure

import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.exceptions import InvalidInputError
from app.measures.atomic import AtomicMeasure
from app.measures.sampled import Box


class Grid(BaseModel):
    """Regular grid of cubes with side h anchored at lower"""

    model_config = ConfigDict(frozen=True)

    lower: Tuple[float, ...]
    h: float = Field(gt=0)
    shape: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_grid(self) -> "Grid":
        if len(self.lower) != len(self.shape):
            raise ValueError("grid corner and shape disagree on dimension")
        if any(k < 1 for k in self.shape):
            raise ValueError("grid needs at least one cell per axis")
        return self

    @property
    def cell_volume(self) -> float:
        return self.h ** len(self.shape)

    @property
    def upper(self) -> Tuple[float, ...]:
        return tuple(lo + k * self.h for lo, k in zip(self.lower, self.shape))

    @property
    def cell_count(self) -> int:
        return int(np.prod(self.shape))

    @classmethod
    def covering(cls, box: Box, h: float) -> "Grid":
        """Smallest grid with side h anchored at box.lower that contains the box"""
        extent = np.asarray(box.upper) - np.asarray(box.lower)
        shape = tuple(max(1, int(math.ceil(e / h - 1e-9))) for e in extent)
        return cls(lower=box.lower, h=h, shape=shape)

    def cell_of(self, coords: np.ndarray) -> np.ndarray:
        """
        Integer cell index of each row; points on the upper faces fall in the last cell.

        Raises:
            InvalidInputError: if some point lies outside the grid
        """
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        rel = (coords - np.asarray(self.lower)) / self.h
        idx = np.floor(rel).astype(int)
        shape = np.asarray(self.shape)
        on_upper = np.isclose(rel, shape, rtol=0.0, atol=1e-9)
        idx = np.where(on_upper, shape - 1, idx)
        outside = np.any((idx < 0) | (idx >= shape), axis=1)
        if np.any(outside):
            raise InvalidInputError(f"{int(outside.sum())} atoms lie outside the histogram grid")
        return idx

    def center_of(self, cells: np.ndarray) -> np.ndarray:
        return np.asarray(self.lower) + (np.asarray(cells) + 0.5) * self.h


class DensityField(BaseModel):
    """Occupied cells of a histogram with mass and density per cell"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: Grid
    cells: np.ndarray
    masses: np.ndarray

    @property
    def values(self) -> np.ndarray:
        """Mass divided by the Euclidean cell volume"""
        return self.masses / self.grid.cell_volume

    @property
    def max_density(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    @property
    def total_mass(self) -> float:
        return float(self.values.sum() * self.grid.cell_volume)

    def rows(self) -> List[List[float]]:
        """(cell center coordinates..., value) per occupied cell, for CSV export"""
        centers = self.grid.center_of(self.cells)
        return [[*center.tolist(), float(v)] for center, v in zip(centers, self.values)]


def histogram_density(mu: AtomicMeasure, grid: Grid) -> DensityField:
    """Bin the atoms of mu into the grid cells"""
    if len(grid.shape) != 2 * mu.n + 1:
        raise InvalidInputError(f"grid has dimension {len(grid.shape)}, measure lives in R^{2 * mu.n + 1}")
    idx = grid.cell_of(mu.coordinates())
    cells, inverse = np.unique(idx, axis=0, return_inverse=True)
    masses = np.zeros(cells.shape[0])
    np.add.at(masses, inverse.reshape(-1), mu.weight_array())
    return DensityField(grid=grid, cells=cells, masses=masses)
