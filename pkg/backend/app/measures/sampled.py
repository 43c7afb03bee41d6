# Sampled Measures
# File: sampled.py
# Author: Transport Toolkit Team
# Date: 2026-10-04
# Purpose: Absolutely continuous measures given by a sampler and a density, and their empirical versions

import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.heisenberg.group import Point, as_stack
from app.measures.atomic import AtomicMeasure

Sampler = Callable[[np.random.Generator, int], np.ndarray]
Density = Callable[[np.ndarray], np.ndarray]


class Box(BaseModel):
    """Axis-aligned box in R^{2n+1} coordinates"""

    model_config = ConfigDict(frozen=True)

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    @model_validator(mode="after")
    def _check_box(self) -> "Box":
        if len(self.lower) != len(self.upper) or len(self.lower) < 3 or len(self.lower) % 2 == 0:
            raise ValueError("box corners must both have 2n+1 coordinates")
        if any(not (lo < hi) for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("box lower corner must be strictly below the upper corner")
        return self

    @property
    def n(self) -> int:
        return (len(self.lower) - 1) // 2

    @property
    def volume(self) -> float:
        return float(np.prod(np.asarray(self.upper) - np.asarray(self.lower)))

    def contains(self, points: Union[np.ndarray, Sequence[Point], Point], tol: float = 0.0) -> np.ndarray:
        """Row-wise membership with an absolute slack"""
        coords = as_stack(points)
        return np.all((coords >= np.asarray(self.lower) - tol) & (coords <= np.asarray(self.upper) + tol), axis=-1)

    def inflate(self, fraction: Optional[float] = None) -> "Box":
        """Grow every side by fraction of its length (half on each end)"""
        fraction = settings.BOX_INFLATION if fraction is None else fraction
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        pad = 0.5 * fraction * (hi - lo)
        return Box(lower=tuple((lo - pad).tolist()), upper=tuple((hi + pad).tolist()))

    @classmethod
    def bounding(cls, *point_sets: Union[np.ndarray, Sequence[Point]], fraction: Optional[float] = None) -> "Box":
        """Smallest box containing all point sets, inflated by fraction (default BOX_INFLATION)"""
        coords = np.vstack([as_stack(p) for p in point_sets])
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        # degenerate extents get unit width
        flat = hi - lo <= 0
        lo = np.where(flat, lo - 0.5, lo)
        hi = np.where(flat, hi + 0.5, hi)
        return cls(lower=tuple(lo.tolist()), upper=tuple(hi.tolist())).inflate(fraction)


class SampledMeasure:
    """
    Probability measure with a density against Haar (= Lebesgue) measure.

    Attributes:
        sampler: (rng, N) -> array (N, 2n+1) of i.i.d. draws
        density: array (k, 2n+1) -> array (k,) of density values
        support_box: box containing the support
        density_max: sup of the density, when known
    """

    def __init__(
        self,
        sampler: Sampler,
        density: Density,
        support_box: Box,
        density_max: Optional[float] = None,
        name: str = "sampled",
    ):
        self.sampler = sampler
        self.density = density
        self.support_box = support_box
        self.density_max = density_max
        self.name = name

    @property
    def n(self) -> int:
        return self.support_box.n

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        draws = np.asarray(self.sampler(rng, size), dtype=float)
        if draws.shape != (size, 2 * self.n + 1):
            raise InvalidInputError(f"sampler returned shape {draws.shape}, expected {(size, 2 * self.n + 1)}")
        return draws

    def check_normalization(self, samples: int = 100_000, seed: Optional[int] = None) -> Tuple[float, float]:
        """
        Monte Carlo integral of the density over support_box.

        Returns:
            (estimate, standard error)
        """
        rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
        box = self.support_box
        pts = rng.uniform(box.lower, box.upper, size=(samples, 2 * self.n + 1))
        values = box.volume * np.asarray(self.density(pts), dtype=float)
        return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))


def uniform_box(box: Box) -> SampledMeasure:
    """Uniform probability measure on a box"""
    lower = np.asarray(box.lower)
    upper = np.asarray(box.upper)
    height = 1.0 / box.volume

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(lower, upper, size=(size, lower.size))

    def density(points: np.ndarray) -> np.ndarray:
        return np.where(box.contains(points), height, 0.0)

    return SampledMeasure(sampler, density, box, density_max=height, name="uniform_box")


def empirical(sampled: SampledMeasure, N: int, seed: Optional[int] = None) -> AtomicMeasure:
    """N i.i.d. draws with weights 1/N; deterministic for a fixed seed"""
    if N < 1:
        raise InvalidInputError(f"sample size must be positive, got {N}")
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    draws = sampled.sample(rng, N)
    return AtomicMeasure.from_arrays(draws, np.full(N, 1.0 / N))
