# Haar Ball Volume
# File: volume.py
# Author: Transport Toolkit Team
# Date: 2026-10-03
# Purpose: Monte Carlo estimate of CC ball volumes with a write-once cache for c_n

import math
import threading
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel, Field

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.heisenberg.distance import cc_norm_arrays
from app.utils.logger import setup_logger

logger = setup_logger(__name__)

_CHUNK = 250_000
_cache: Dict[int, "BallVolumeEstimate"] = {}
_cache_lock = threading.Lock()


class BallVolumeEstimate(BaseModel):
    """Monte Carlo volume of B(0, radius) in H^n"""

    n: int
    radius: float
    volume: float = Field(description="Estimated Lebesgue volume")
    standard_error: float
    samples: int
    hits: int
    seed: int


def ball_volume(
    n: int = 1,
    radius: float = 1.0,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    vertical_halfwidth: float = 1.0,
) -> BallVolumeEstimate:
    """
    Hit-or-miss estimate of vol(B(0, r)).

    Samples a box with |xi_j|, |eta_j| <= r and |t| <= vertical_halfwidth * r^2.
    The ball satisfies |zeta| <= r and |t| <= (2/pi) r^2, so the default box
    contains it.
    """
    if n < 1:
        raise InvalidInputError(f"group index must be at least 1, got {n}")
    if not radius > 0:
        raise InvalidInputError(f"radius must be positive, got {radius}")
    samples = settings.BALL_VOLUME_SAMPLES if samples is None else samples
    seed = settings.DEFAULT_SEED if seed is None else seed

    rng = np.random.default_rng(seed)
    half = np.concatenate([np.full(2 * n, radius), [vertical_halfwidth * radius ** 2]])
    box_volume = float(np.prod(2.0 * half))

    hits = 0
    remaining = samples
    while remaining > 0:
        size = min(_CHUNK, remaining)
        pts = rng.uniform(-half, half, size=(size, 2 * n + 1))
        hits += int(np.count_nonzero(cc_norm_arrays(pts) <= radius))
        remaining -= size

    p = hits / samples
    estimate = BallVolumeEstimate(
        n=n,
        radius=radius,
        volume=box_volume * p,
        standard_error=box_volume * math.sqrt(p * (1.0 - p) / samples),
        samples=samples,
        hits=hits,
        seed=seed,
    )
    logger.debug(f"Ball volume n={n} r={radius}: {estimate.volume:.6g} +/- {estimate.standard_error:.2g}")
    return estimate


def haar_unit_ball_volume(n: int = 1, samples: Optional[int] = None, seed: Optional[int] = None) -> BallVolumeEstimate:
    """c_n = vol(B(0, 1)); computed once per n, later calls return the cached estimate"""
    with _cache_lock:
        cached = _cache.get(n)
        if cached is None:
            cached = ball_volume(n=n, radius=1.0, samples=samples, seed=seed)
            _cache[n] = cached
            logger.info(f"Cached unit ball volume c_{n} = {cached.volume:.6g} +/- {cached.standard_error:.2g}")
        return cached


def clear_volume_cache() -> None:
    with _cache_lock:
        _cache.clear()
