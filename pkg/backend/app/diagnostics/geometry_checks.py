# Geometry Diagnostics
# File: geometry_checks.py
# Author: Transport Toolkit Team
# Date: 2026-10-09
# Purpose: Randomised checks of group, metric and minimal-curve properties of H^n

import math
from typing import List, Optional

import numpy as np

from app.core.config import settings
from app.diagnostics.reports import CheckReport
from app.heisenberg.distance import cc_norm_arrays, grad_distance, horizontal_derivatives, cc_distance
from app.heisenberg.geodesics import TWO_PI, eval_curve_arrays, exp_geodesic_arrays, log_geodesic_arrays
from app.heisenberg.group import Point, dilate_arrays, join, mul_arrays, split
from app.heisenberg.volume import ball_volume
from app.utils.logger import get_diagnostics_logger

logger = get_diagnostics_logger("geometry")


def _pairs_in_omega(rng: np.random.Generator, n: int, count: int) -> tuple:
    x = rng.normal(size=(count, 2 * n + 1))
    y = rng.normal(size=(count, 2 * n + 1))
    zeta, _ = split(mul_arrays(-x, y))
    keep = np.linalg.norm(zeta, axis=-1) > 1e-3
    return x, y, keep


def _dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return cc_norm_arrays(mul_arrays(-a, b))


def _coordinate_gap(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Largest coordinate error of a against b, relative to max(1, |b|_inf)"""
    scale = np.maximum(1.0, np.abs(b).max(axis=-1))
    return np.abs(a - b).max(axis=-1) / scale


def check_nonbranching(
    trials: int = 1000,
    n: int = 1,
    perturbations: int = 8,
    tol: float = 1e-6,
    seed: Optional[int] = None,
) -> CheckReport:
    """
    Minimal curves do not branch.

    For random (x, y) in Omega with midpoint z, doubling the parameters of the
    curve from x to z must land on y. The landing is compared in coordinates,
    relative to max(1, |y|), because the CC distance turns a t-error e into
    sqrt(pi e). Endpoints y' on the sphere of radius d(x, y) about x near y
    are then searched for a second curve through z; any y' farther than tol
    from y whose midpoint matches z is a violation. Pairs near the center
    line are counted separately.
    """
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    x, y, keep = _pairs_in_omega(rng, n, trials)
    excluded = int(np.count_nonzero(~keep))
    x, y = x[keep], y[keep]

    z = eval_curve_arrays(x, y, 0.5)
    chi, phi, _ = log_geodesic_arrays(mul_arrays(-x, z))
    extendable = np.abs(2.0 * phi) <= TWO_PI
    continued = mul_arrays(x, exp_geodesic_arrays(2.0 * chi, 2.0 * phi, 1.0))
    continuation = np.where(extendable, _coordinate_gap(continued, y), math.inf)

    radius = _dist(x, y)
    branching = np.zeros(x.shape[0])
    for _ in range(perturbations):
        scale = 10.0 ** rng.uniform(-4, -1, size=(x.shape[0], 1))
        candidate = mul_arrays(y, scale * rng.normal(size=y.shape))
        rel = mul_arrays(-x, candidate)
        candidate = mul_arrays(x, dilate_arrays(radius / cc_norm_arrays(rel), rel))
        midpoint = eval_curve_arrays(x, candidate, 0.5)
        same_mid = _dist(midpoint, z) < tol
        moved = _dist(candidate, y) > tol
        branching += (same_mid & moved).astype(float)

    logger.debug(f"nonbranching: {x.shape[0]} pairs, {excluded} near the center line")
    residuals = np.maximum(continuation, np.where(branching > 0, math.inf, 0.0))
    return CheckReport.from_residuals(
        "nonbranching",
        residuals,
        tol,
        center_pairs_excluded=excluded,
        perturbations=perturbations,
        worst_continuation=float(continuation[np.isfinite(continuation)].max()) if continuation.size else 0.0,
    )


def check_ball_scaling(
    n: int = 1,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    band: Optional[float] = None,
) -> CheckReport:
    """vol(B(0,2)) / vol(B(0,1)) against 2^{2n+2} within `band` combined standard errors"""
    seed = settings.DEFAULT_SEED if seed is None else seed
    band = settings.STAT_BAND if band is None else band
    small = ball_volume(n=n, radius=1.0, samples=samples, seed=seed)
    large = ball_volume(n=n, radius=2.0, samples=samples, seed=seed + 1)
    ratio = large.volume / small.volume
    se = ratio * math.hypot(small.standard_error / small.volume, large.standard_error / large.volume)
    expected = 2.0 ** (2 * n + 2)
    return CheckReport.from_residuals(
        "ball_scaling",
        [abs(ratio - expected) / se],
        band,
        statistical=True,
        ratio=ratio,
        expected=expected,
        standard_error=se,
        unit_ball_volume=small.volume,
        unit_ball_standard_error=small.standard_error,
    )


def check_geometry_properties(
    seed: Optional[int] = None,
    n: int = 1,
    triples: int = 10_000,
    round_trips: int = 1000,
    gradient_pairs: int = 1000,
) -> List[CheckReport]:
    """Group axioms, metric axioms, closed forms, curve round trips and the eikonal identity"""
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    dim = 2 * n + 1
    a, b, c = (rng.normal(size=(triples, dim)) for _ in range(3))
    reports = []

    left = mul_arrays(mul_arrays(a, b), c)
    right = mul_arrays(a, mul_arrays(b, c))
    scale = 1.0 + np.abs(left).max(axis=1)
    reports.append(CheckReport.from_residuals("group_associativity", np.abs(left - right).max(axis=1) / scale, 1e-12))
    reports.append(CheckReport.from_residuals("group_inverse", np.abs(mul_arrays(a, -a)).max(axis=1), 1e-12))

    d_ab, d_bc, d_ac = _dist(a, b), _dist(b, c), _dist(a, c)
    reports.append(CheckReport.from_residuals("triangle_inequality", d_ac - d_ab - d_bc, 1e-9))
    reports.append(CheckReport.from_residuals("symmetry", np.abs(d_ab - _dist(b, a)), 1e-9))
    shifted = _dist(mul_arrays(c, a), mul_arrays(c, b))
    reports.append(CheckReport.from_residuals("left_invariance", np.abs(shifted - d_ab) / (1.0 + d_ab), 1e-9))
    r = rng.uniform(0.1, 10.0, size=triples)
    dilated = _dist(dilate_arrays(r, a), dilate_arrays(r, b))
    reports.append(CheckReport.from_residuals("dilation_homogeneity", np.abs(dilated - r * d_ab) / (1.0 + r * d_ab), 1e-9))

    zeta = rng.normal(size=(triples, n)) + 1j * rng.normal(size=(triples, n))
    horizontal = cc_norm_arrays(join(zeta, np.zeros(triples)))
    vertical_t = rng.normal(size=triples)
    vertical = cc_norm_arrays(join(np.zeros((triples, n), dtype=complex), vertical_t))
    closed = np.concatenate([
        np.abs(horizontal - np.linalg.norm(zeta, axis=-1)),
        np.abs(vertical - np.sqrt(math.pi * np.abs(vertical_t))),
    ])
    reports.append(CheckReport.from_residuals("closed_form_distances", closed, 1e-10))

    chi = rng.normal(size=(round_trips, n)) + 1j * rng.normal(size=(round_trips, n))
    phi = rng.uniform(-TWO_PI + 0.01, TWO_PI - 0.01, size=round_trips)
    chi_back, phi_back, _ = log_geodesic_arrays(exp_geodesic_arrays(chi, phi, 1.0))
    log_exp = np.maximum(np.abs(chi_back - chi).max(axis=1), np.abs(phi_back - phi))
    reports.append(CheckReport.from_residuals("log_exp_round_trip", log_exp, 1e-9))

    x, y, keep = _pairs_in_omega(rng, n, round_trips)
    x, y = x[keep], y[keep]
    chi_xy, phi_xy, _ = log_geodesic_arrays(mul_arrays(-x, y))
    rebuilt = mul_arrays(x, exp_geodesic_arrays(chi_xy, phi_xy, 1.0))
    reports.append(CheckReport.from_residuals("exp_log_round_trip", np.abs(rebuilt - y).max(axis=1), 1e-8))

    s, s2 = np.sort(rng.uniform(0, 1, size=(2, x.shape[0])), axis=0)
    speed = _dist(eval_curve_arrays(x, y, s), eval_curve_arrays(x, y, s2)) - (s2 - s) * _dist(x, y)
    reports.append(CheckReport.from_residuals("constant_speed", np.abs(speed), 1e-6))

    reports.extend(_eikonal_reports(rng, n, gradient_pairs))
    return reports


def _eikonal_reports(rng: np.random.Generator, n: int, pairs: int) -> List[CheckReport]:
    """|grad_H d_y| = 1 analytically, and agreement with central differences"""
    analytic, numeric = [], []
    step = settings.FD_STEP
    for k in range(pairs):
        x = Point.from_array(rng.normal(size=2 * n + 1))
        y = Point.from_array(rng.normal(size=2 * n + 1))
        if float(np.linalg.norm(mul_arrays(-y.as_array(), x.as_array())[:2 * n])) < 1e-3:
            continue
        grad, _ = grad_distance(x, y)
        analytic.append(abs(np.linalg.norm(grad) - 1.0))
        # finite differences are sampled on a tenth of the pairs
        if k % 10 == 0:
            fx, fy = horizontal_derivatives(lambda p: cc_distance(p, y), x, step)
            numeric.append(float(np.abs(fx + 1j * fy - grad).max()))
    return [
        CheckReport.from_residuals("eikonal_analytic", analytic, 1e-9),
        CheckReport.from_residuals("eikonal_finite_difference", numeric, 1e-4),
    ]
