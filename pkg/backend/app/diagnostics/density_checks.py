# Density Diagnostics
# File: density_checks.py
# Author: Transport Toolkit Team
# Date: 2026-10-09
# Purpose: Monte Carlo checks of contraction, interpolant densities and transport-set lower density

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import binom

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.diagnostics.reports import CheckReport
from app.heisenberg.distance import cc_norm_arrays, distances_from
from app.heisenberg.geodesics import TWO_PI, eval_curve_arrays, exp_geodesic_arrays, log_geodesic_arrays
from app.heisenberg.group import Point, dilate_arrays, mul_arrays
from app.measures.atomic import AtomicMeasure
from app.measures.histogram import Grid, histogram_density
from app.measures.sampled import Box
from app.solvers.interpolation import interpolate
from app.solvers.plans import TransportPlan
from app.utils.logger import get_diagnostics_logger

logger = get_diagnostics_logger("density")

_CHUNK = 200_000


# ---------------------------------------------------------------------------
# Measure contraction
# ---------------------------------------------------------------------------

def _contract(points: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
    """(e_t o S)(x, y) for every row x"""
    return eval_curve_arrays(points, y, t)


def _jacobian_volume(box: Box, y: np.ndarray, t: float, samples: int, rng: np.random.Generator, step: float) -> Tuple[float, float]:
    """vol of the image of box via the mean |det D(e_t o S)(., y)|; returns (estimate, standard error)"""
    dim = len(box.lower)
    dets = []
    remaining = samples
    chunk = max(1, _CHUNK // (2 * dim))
    while remaining > 0:
        size = min(chunk, remaining)
        pts = rng.uniform(box.lower, box.upper, size=(size, dim))
        jac = np.empty((size, dim, dim))
        for c in range(dim):
            e = np.zeros(dim)
            e[c] = step
            jac[:, :, c] = (_contract(pts + e, y, t) - _contract(pts - e, y, t)) / (2.0 * step)
        dets.append(np.abs(np.linalg.det(jac)))
        remaining -= size
    values = box.volume * np.concatenate(dets)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))


def _membership_volume(box: Box, y: np.ndarray, t: float, samples: int, rng: np.random.Generator) -> Tuple[float, float]:
    """
    Hit-or-miss volume of the image.

    z is in the image iff the curve from y through z, extended by 1/(1-t),
    stays minimal (|phi| <= 2pi) and ends in the box.
    """
    dim = len(box.lower)
    probe = _contract(rng.uniform(box.lower, box.upper, size=(min(samples, 20_000), dim)), y, t)
    hull = Box.bounding(probe, fraction=0.2)
    hits = 0
    remaining = samples
    while remaining > 0:
        size = min(_CHUNK, remaining)
        z = rng.uniform(hull.lower, hull.upper, size=(size, dim))
        chi, phi, center = log_geodesic_arrays(mul_arrays(-y[None, :], z))
        chi, phi = chi / (1.0 - t), phi / (1.0 - t)
        minimal = ~center & (np.abs(phi) <= TWO_PI)
        source = mul_arrays(y[None, :], exp_geodesic_arrays(chi, np.where(minimal, phi, 0.0), 1.0))
        hits += int(np.count_nonzero(minimal & box.contains(source)))
        remaining -= size
    p = hits / samples
    return hull.volume * p, hull.volume * math.sqrt(p * (1.0 - p) / samples)


def check_mcp_contraction(
    box: Box,
    y: Point,
    t: float,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    estimator: str = "jacobian",
    band: Optional[float] = None,
) -> CheckReport:
    """
    Measure contraction toward y.

    Asserts vol(E) (1-t)^{2n+3} <= vol((e_t o S)(E, y)) within `band` standard
    errors for the solid box E. The image volume comes from the Jacobian of the
    contraction map ("jacobian") or a hit-or-miss membership test ("membership").
    The weaker Euclidean-style exponent 2n+1 is reported alongside.
    """
    if not 0.0 < t < 1.0:
        raise InvalidInputError(f"contraction time must lie in (0, 1), got {t}")
    if estimator not in ("jacobian", "membership"):
        raise InvalidInputError(f"unknown volume estimator {estimator!r}")
    samples = settings.MCP_SAMPLES if samples is None else samples
    seed = settings.DEFAULT_SEED if seed is None else seed
    band = settings.STAT_BAND if band is None else band
    rng = np.random.default_rng(seed)
    n = box.n
    y_arr = y.as_array()

    if estimator == "jacobian":
        image, se = _jacobian_volume(box, y_arr, t, samples, rng, settings.FD_STEP)
    else:
        image, se = _membership_volume(box, y_arr, t, samples, rng)

    bound = (1.0 - t) ** (2 * n + 3) * box.volume
    naive = (1.0 - t) ** (2 * n + 1) * box.volume
    residual = (bound - image) / se if se > 0 else (0.0 if image >= bound else math.inf)
    return CheckReport.from_residuals(
        "mcp_contraction",
        [residual],
        band,
        statistical=True,
        t=t,
        estimator=estimator,
        box_volume=box.volume,
        image_volume=image,
        image_standard_error=se,
        bound=bound,
        naive_bound=naive,
        naive_bound_holds=bool(image + band * se >= naive),
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Interpolant density
# ---------------------------------------------------------------------------

def _shuffled_plan(gamma: TransportPlan, rng: np.random.Generator) -> TransportPlan:
    """Dominant targets permuted across source atoms; a non-optimal negative control"""
    dominant = np.argmax(gamma.matrix(), axis=1)
    permuted = rng.permutation(dominant)
    weights = gamma.source.weight_array()
    mass = np.bincount(permuted, weights, gamma.target.size)
    keep = np.nonzero(mass > 0)[0]
    target = AtomicMeasure.from_arrays(gamma.target.coordinates()[keep], mass[keep], normalize=True, merge=False)
    relabel = {int(j): k for k, j in enumerate(keep)}
    entries = [(i, relabel[int(j)], float(weights[i])) for i, j in enumerate(permuted) if weights[i] > 0]
    return TransportPlan(source=gamma.source, target=target, entries=entries)


def _focusing_plan(gamma: TransportPlan, t: float) -> TransportPlan:
    """
    Control plan whose interpolant at time t collapses onto one point c.

    c is the source mean left-translated by a horizontal step of a few source
    radii, far enough that every source reaches it with a small twist. Each
    source x is sent along the minimal curve through c, extended so that it
    passes c at time t. Sources whose extended curve would stop being minimal
    stay where they are.
    """
    src = gamma.source.coordinates()
    weights = gamma.source.weight_array()
    n = gamma.source.n
    mean = src.mean(axis=0)
    rel = mul_arrays(-mean[None, :], src)
    reach = max(1.0, float(np.abs(rel[:, :2 * n]).max()), math.sqrt(float(np.abs(rel[:, -1]).max())))
    step = np.zeros(2 * n + 1)
    step[0] = 6.0 * reach
    c = mul_arrays(mean, step)
    chi, phi, center = log_geodesic_arrays(mul_arrays(-src, c[None, :]))
    # well inside the cut locus so the curve is recovered from its endpoints
    focused = ~center & (np.abs(phi / t) < 0.9 * TWO_PI)
    extended = mul_arrays(src, exp_geodesic_arrays(chi / t, np.where(focused, phi / t, 0.0), 1.0))
    targets = np.where(focused[:, None], extended, src)
    target = AtomicMeasure.from_arrays(targets, weights, normalize=True, merge=False)
    entries = [(i, i, float(w)) for i, w in enumerate(weights) if w > 0]
    return TransportPlan(source=gamma.source, target=target, entries=entries)


def _density_band(values: AtomicMeasure, t: float, h: float, rho_max: float, alpha: float, samples: int) -> Dict[str, float]:
    coords = values.coordinates()
    dim = coords.shape[1]
    n = (dim - 1) // 2
    grid = Grid.covering(Box.bounding(coords, fraction=0.0), h)
    field = histogram_density(values, grid)
    bound = (1.0 - t) ** (-(2 * n + 3)) * rho_max
    p = min(1.0, bound * grid.cell_volume)
    threshold = binom.ppf(1.0 - alpha / grid.cell_count, samples, p)
    allowed = threshold / (samples * grid.cell_volume)
    return {
        "max_density": field.max_density,
        "bound": bound,
        "allowed": float(allowed),
        "slack": float(allowed / bound - 1.0),
        "cells": grid.cell_count,
    }


def check_interpolant_density(
    gamma: TransportPlan,
    t: float,
    rho_max: float,
    h: Optional[float] = None,
    alpha: Optional[float] = None,
    seed: Optional[int] = None,
    negative_control: bool = True,
) -> CheckReport:
    """
    L-infinity bound for the interpolant at time t.

    The histogram of interpolate(gamma, t) with cubes of side h must stay below
    (1-t)^{-(2n+3)} rho_max up to a binomial band: a cell whose true mass is at
    most bound * h^dim holds, for N source samples, at most the (1 - alpha/cells)
    quantile of Binomial(N, bound * h^dim) of them. The source must be an
    equal-weight sample of the density. A shuffled plan is reported as a
    negative control without affecting the verdict. For t > 0 a focusing plan,
    whose interpolant piles the source onto one point, is reported too; it
    must exceed the band.
    """
    if not 0.0 <= t < 1.0:
        raise InvalidInputError(f"interpolant density is checked for t in [0, 1), got {t}")
    h = settings.GRID_H if h is None else h
    alpha = settings.DENSITY_ALPHA if alpha is None else alpha
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    samples = gamma.source.size

    band = _density_band(interpolate(gamma, t), t, h, rho_max, alpha, samples)
    details = dict(band, t=t, h=h, alpha=alpha, samples=samples)
    if negative_control:
        control = _density_band(interpolate(_shuffled_plan(gamma, rng), t), t, h, rho_max, alpha, samples)
        details["negative_control"] = {
            "max_density": control["max_density"],
            "exceeds_band": bool(control["max_density"] > control["allowed"]),
        }
        if t > 0.0:
            focus = _density_band(interpolate(_focusing_plan(gamma, t), t), t, h, rho_max, alpha, samples)
            details["focusing_control"] = {
                "max_density": focus["max_density"],
                "exceeds_band": bool(focus["max_density"] > focus["allowed"]),
            }
    return CheckReport.from_residuals(
        "interpolant_density",
        [band["max_density"] / band["allowed"]],
        1.0,
        statistical=True,
        **details,
    )


# ---------------------------------------------------------------------------
# Lower density of transport sets
# ---------------------------------------------------------------------------

def _unit_ball_samples(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points of B(0, 1) by rejection from |xi|, |eta| <= 1, |t| <= 2/pi"""
    half = np.concatenate([np.ones(2 * n), [2.0 / math.pi]])
    out: List[np.ndarray] = []
    have = 0
    while have < size:
        draw = rng.uniform(-half, half, size=(2 * size, 2 * n + 1))
        inside = draw[cc_norm_arrays(draw) <= 1.0]
        out.append(inside)
        have += inside.shape[0]
    return np.vstack(out)[:size]


def _cover_counts(z: np.ndarray, centers: np.ndarray, radius: float) -> np.ndarray:
    """Number of balls B(center, radius) containing each row of z"""
    counts = np.zeros(z.shape[0], dtype=int)
    block = max(1, _CHUNK // max(1, centers.shape[0]))
    for start in range(0, z.shape[0], block):
        part = z[start:start + block]
        rel = mul_arrays(-part[:, None, :], centers[None, :, :])
        dist = cc_norm_arrays(rel.reshape(-1, z.shape[1])).reshape(part.shape[0], centers.shape[0])
        counts[start:start + block] = np.count_nonzero(dist <= radius, axis=1)
    return counts


def _tube_share(
    x: np.ndarray,
    curves: np.ndarray,
    radius: float,
    delta: float,
    unit: np.ndarray,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """
    Share of B(x, delta) covered by the balls of the given radius around the curve samples.

    Union-of-balls estimator: pick a ball uniformly, a point uniformly inside it,
    and weight the point by 1[z in B(x, delta)] / (number of balls holding z).
    Only balls that can meet B(x, delta) take part. Haar volumes of balls scale
    as r^{2n+2}, so the share is K (radius/delta)^{2n+2} times the mean weight.

    Returns:
        (estimate, standard error)
    """
    centers = curves[cc_norm_arrays(mul_arrays(-x[None, :], curves)) < delta + radius]
    if centers.shape[0] == 0:
        return 0.0, 0.0
    n = (x.size - 1) // 2
    pick = rng.integers(0, centers.shape[0], size=unit.shape[0])
    z = mul_arrays(centers[pick], dilate_arrays(radius, unit))
    inside = cc_norm_arrays(mul_arrays(-x[None, :], z)) < delta
    weight = inside / np.maximum(_cover_counts(z, centers, radius), 1)
    scale = centers.shape[0] * (radius / delta) ** (2 * n + 2)
    se = float(weight.std(ddof=1)) / math.sqrt(weight.size) if weight.size > 1 else 0.0
    return scale * float(weight.mean()), scale * se


def check_transport_lower_density(
    gamma: TransportPlan,
    entry: int,
    r: float,
    deltas: Sequence[float],
    samples: Optional[int] = None,
    tube_fraction: Optional[float] = None,
    curve_samples: Optional[int] = None,
    floor: float = 0.0,
    seed: Optional[int] = None,
) -> CheckReport:
    """
    Density of the transport set around a support pair.

    For the entry (x, y) and each delta, the qualifying pairs are the entries
    (x', y') with d(x', x) < delta/2 and d(y', y) < r. The share of B(x, delta)
    covered by the tubes of radius tube_fraction * delta around their curves is
    estimated with a union-of-balls sampler; a non-vacuous ratio at or below
    floor is a violation. The curve sampling is refined so consecutive samples
    sit within half a tube radius.
    """
    samples = settings.LOWER_DENSITY_SAMPLES if samples is None else samples
    tube_fraction = settings.TUBE_FRACTION if tube_fraction is None else tube_fraction
    curve_samples = settings.CURVE_SAMPLES if curve_samples is None else curve_samples
    if not 0 <= entry < gamma.size:
        raise InvalidInputError(f"plan has no entry {entry}")
    deltas = list(deltas)
    if any(not d > 0 for d in deltas):
        raise InvalidInputError("deltas must be positive")

    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    xs, ys = gamma.pair_coordinates()
    x, y = xs[entry], ys[entry]
    if np.allclose(x, y, rtol=0.0, atol=settings.OMEGA_TOLERANCE):
        raise InvalidInputError("lower density is checked on a pair with x != y")
    near_x = distances_from(x, xs)
    near_y = distances_from(y, ys)
    unit = _unit_ball_samples((xs.shape[1] - 1) // 2, samples, rng)

    ratios: List[Optional[float]] = []
    errors: List[Optional[float]] = []
    qualifying: List[int] = []
    residuals: List[float] = []
    for delta in deltas:
        chosen = np.nonzero((near_x < delta / 2.0) & (near_y < r))[0]
        qualifying.append(int(chosen.size))
        if chosen.size == 0:
            ratios.append(0.0)
            errors.append(0.0)
            continue
        radius = tube_fraction * delta
        lengths = cc_norm_arrays(mul_arrays(-xs[chosen], ys[chosen]))
        count = max(curve_samples, int(math.ceil(2.0 * lengths.max() / radius)) + 1)
        s = np.linspace(0.0, 1.0, count)
        starts = np.repeat(xs[chosen], count, axis=0)
        ends = np.repeat(ys[chosen], count, axis=0)
        curves = eval_curve_arrays(starts, ends, np.tile(s, chosen.size))
        p, se = _tube_share(x, curves, radius, delta, unit, rng)
        ratios.append(p)
        errors.append(se)
        residuals.append(1.0 if p <= floor else 0.0)

    vacuous = [q == 0 for q in qualifying]
    return CheckReport.from_residuals(
        "transport_lower_density",
        residuals,
        0.0,
        statistical=True,
        deltas=deltas,
        ratios=ratios,
        standard_errors=errors,
        qualifying_pairs=qualifying,
        vacuous=vacuous,
        tube_fraction=tube_fraction,
        floor=floor,
        measured_floor=min((q for q, v in zip(ratios, vacuous) if not v), default=0.0),
    )
