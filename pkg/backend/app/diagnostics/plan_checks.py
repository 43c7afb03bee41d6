# Plan Diagnostics
# File: plan_checks.py
# Author: Transport Toolkit Team
# Date: 2026-10-08
# Purpose: Structural checks on transport plans: cyclical monotonicity, rays, potentials, graphs

import itertools
import math
from typing import Callable, List, Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.diagnostics.reports import CheckReport
from app.heisenberg.distance import cc_norm_arrays, distance_matrix
from app.heisenberg.geodesics import eval_curve_arrays, log_geodesic_arrays
from app.heisenberg.group import Point, mul_arrays, split
from app.solvers.kantorovich import cost_matrix
from app.solvers.plans import DualPotential, TransportPlan
from app.utils.logger import get_diagnostics_logger

logger = get_diagnostics_logger("plans")

CostLike = Union[None, Callable[[Point, Point], float], np.ndarray]


def graph_dispersion(gamma: TransportPlan) -> float:
    """sum_i (w_i - max_j gamma_ij): mass not sent to each atom's dominant target"""
    matrix = gamma.matrix()
    return float(max(0.0, (gamma.source.weight_array() - matrix.max(axis=1)).sum()))


def _cycles(entries: int, length: int, trials: int, rng: np.random.Generator) -> List[tuple]:
    """All cycles through distinct entries when few, else `trials` random ones"""
    if entries < length:
        return []
    total = math.comb(entries, length) * math.factorial(length - 1)
    if total <= trials:
        out = []
        for combo in itertools.combinations(range(entries), length):
            head, rest = combo[0], combo[1:]
            out.extend((head, *perm) for perm in itertools.permutations(rest))
        return out
    return [tuple(rng.choice(entries, size=length, replace=False)) for _ in range(trials)]


def check_cyclical_monotonicity(
    gamma: TransportPlan,
    cost: CostLike = None,
    max_cycle: int = 3,
    trials: int = 1000,
    tol: float = 1e-9,
    seed: Optional[int] = None,
) -> CheckReport:
    """
    Cycles (x_1, y_1) ... (x_L, y_L) through plan entries must satisfy
    sum c(x_k, y_k) <= sum c(x_{k+1}, y_k) + tol.

    Args:
        cost: Pointwise cost, a precomputed cost matrix, or None for the CC distance
        max_cycle: Longest cycle length, 2 to 4
        trials: Cycles sampled per length when enumeration would exceed it
    """
    if max_cycle not in (2, 3, 4):
        raise InvalidInputError(f"max_cycle must be 2, 3 or 4, got {max_cycle}")
    c = cost if isinstance(cost, np.ndarray) else cost_matrix(gamma.source, gamma.target, cost)
    rows, cols = gamma.rows, gamma.cols
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)

    residuals = []
    for length in range(2, max_cycle + 1):
        for cycle in _cycles(gamma.size, length, trials, rng):
            idx = np.asarray(cycle)
            shifted = np.roll(idx, -1)
            kept = c[rows[idx], cols[idx]].sum()
            swapped = c[rows[shifted], cols[idx]].sum()
            residuals.append(kept - swapped)
    return CheckReport.from_residuals(
        "cyclical_monotonicity",
        residuals,
        tol,
        max_cycle=max_cycle,
        entries=gamma.size,
    )


def check_monotone_rays(
    gamma: TransportPlan,
    tol: float = 1e-6,
    curve_samples: Optional[int] = None,
) -> CheckReport:
    """
    Ordering of plan pairs along shared rays.

    Whenever a source x' of the plan lies on the selected curve from x to y
    for another entry (x, y), the four points must order as x, x', y, y' on
    one curve. Incidence is tested by the triangle equality and confirmed by
    the distance from x' to the curve sampled in s (plus the exact arc-length
    position of x').
    """
    curve_samples = settings.CURVE_SAMPLES if curve_samples is None else curve_samples
    src, tgt = gamma.source.coordinates(), gamma.target.coordinates()
    rows, cols = gamma.rows, gamma.cols
    d_ss = distance_matrix(src, src)
    d_st = distance_matrix(src, tgt)
    d_tt = distance_matrix(tgt, tgt)

    residuals: List[float] = []
    incidences = 0
    grid = np.linspace(0.0, 1.0, curve_samples)
    for e in range(gamma.size):
        i, j = rows[e], cols[e]
        d_xy = d_st[i, j]
        if d_xy <= tol:
            continue
        other_i = rows
        gap = d_ss[i, other_i] + d_st[other_i, j] - d_xy
        candidates = np.nonzero((np.abs(gap) < tol) & (other_i != i) & (d_ss[i, other_i] > tol))[0]
        for f in candidates:
            k, l = rows[f], cols[f]
            s_star = min(1.0, d_ss[i, k] / d_xy)
            s_values = np.append(grid, s_star)
            curve = eval_curve_arrays(np.repeat(src[i][None, :], s_values.size, axis=0), tgt[j], s_values)
            on_curve = cc_norm_arrays(mul_arrays(-curve, src[k])).min()
            if not on_curve < tol:
                continue
            incidences += 1
            # x, x', y, y' along one curve
            chain_tail = abs(d_st[k, j] + d_tt[j, l] - d_st[k, l])
            chain_full = abs(d_ss[i, k] + d_st[k, l] - d_st[i, l])
            order = max(0.0, d_st[k, j] - d_st[k, l])
            residuals.append(max(chain_tail, chain_full, order))
    report = CheckReport.from_residuals("monotone_rays", residuals, tol, incidences=incidences, entries=gamma.size)
    if incidences == 0:
        report.details["vacuous"] = True
    return report


def check_plan_on_omega(gamma: TransportPlan, tol: Optional[float] = None) -> CheckReport:
    """Off-diagonal entries must join points off each other's center line"""
    tol = settings.OMEGA_TOLERANCE if tol is None else tol
    xs, ys = gamma.pair_coordinates()
    zeta, t = split(mul_arrays(-xs, ys))
    horizontal = np.linalg.norm(zeta, axis=-1)
    off_diagonal = (horizontal > tol) | (np.abs(t) > tol)
    on_center = off_diagonal & (horizontal <= tol)
    residuals = on_center.astype(float)
    return CheckReport.from_residuals(
        "plan_on_omega",
        residuals[off_diagonal],
        0.0,
        center_mass=float(gamma.masses[on_center].sum()),
        diagonal_mass=float(gamma.masses[~off_diagonal].sum()),
    )


def _horizontal_gradients(coords: np.ndarray, values: np.ndarray, neighbours: int) -> np.ndarray:
    """
    Least-squares horizontal gradients of sampled values.

    For neighbours z = x . w the first-order model u(z) - u(x) ~ <grad_H u, w_h> + T u w_t
    is fitted in the left-invariant frame at x.

    Returns:
        Complex array (k, n); NaN rows where the stencil is degenerate
    """
    k, dim = coords.shape
    n = (dim - 1) // 2
    count = min(neighbours + 1, k)
    out = np.full((k, n), np.nan, dtype=complex)
    if count < dim + 1:
        return out
    _, idx = cKDTree(coords).query(coords, k=count)
    for a in range(k):
        nb = idx[a, 1:]
        w = mul_arrays(-coords[a], coords[nb])
        rhs = values[nb] - values[a]
        sol, _, rank, _ = np.linalg.lstsq(w, rhs, rcond=None)
        if rank == dim:
            out[a] = sol[:n] + 1j * sol[n:2 * n]
    return out


def check_potential_lipschitz_and_gradient(
    u: DualPotential,
    gamma: TransportPlan,
    tol: float = 1e-9,
    neighbours: int = 12,
    cosine_floor: float = 0.9,
    required_fraction: float = 0.9,
    gradient: bool = True,
) -> CheckReport:
    """
    Kantorovich potential of the distance cost.

    (a) |u(a) - u(b)| <= d(a, b) on all support points; (b) u(x_i) - u(y_j) = d(x_i, y_j)
    on plan entries; (c) for entries in Omega the curve parameter chi of x^{-1} y
    points along -grad_H u(x), with the gradient fitted from neighbouring atoms.
    (c) fails when fewer than required_fraction of the entries reach cosine_floor.
    """
    src, tgt = gamma.source.coordinates(), gamma.target.coordinates()
    points = np.vstack([src, tgt])
    values = np.concatenate([u.source_values(), u.target_values()])
    d_all = distance_matrix(points, points)

    lipschitz = np.abs(values[:, None] - values[None, :]) - d_all
    lip_residuals = lipschitz[np.triu_indices(points.shape[0], k=1)]

    rows, cols = gamma.rows, gamma.cols
    m = src.shape[0]
    equality = np.abs(values[rows] - values[m + cols] - d_all[rows, m + cols])

    details = {
        "lipschitz_worst": float(lip_residuals.max()) if lip_residuals.size else 0.0,
        "equality_worst": float(equality.max()),
    }
    residuals = np.concatenate([lip_residuals, equality])

    if gradient:
        chi, _, center = log_geodesic_arrays(mul_arrays(-src[rows], tgt[cols]))
        length = np.linalg.norm(chi, axis=-1)
        eligible = ~center & (length > tol)
        grads = _horizontal_gradients(src, u.source_values(), neighbours)[rows]
        eligible &= ~np.isnan(grads).any(axis=1)
        direction = -grads[eligible]
        dot = np.sum((np.conj(chi[eligible]) * direction).real, axis=-1)
        norms = length[eligible] * np.linalg.norm(direction, axis=-1)
        cosines = dot / np.where(norms > 0, norms, 1.0)
        fraction = float(np.mean(cosines >= cosine_floor)) if cosines.size else 1.0
        details.update(
            gradient_entries=int(eligible.sum()),
            gradient_cosine_fraction=fraction,
            gradient_cosine_median=float(np.median(cosines)) if cosines.size else None,
        )
        # a failed stencil test counts as one violation
        residuals = np.append(residuals, 0.0 if fraction >= required_fraction else math.inf)

    return CheckReport.from_residuals("potential_lipschitz_and_gradient", residuals, tol, **details)


def check_interpolation_injectivity(gamma: TransportPlan, t: float, tol: float = 1e-9) -> CheckReport:
    """
    Distinct source atoms must reach distinct points at time t < 1.

    Split atoms follow their dominant target.
    """
    if not 0.0 <= t < 1.0:
        raise InvalidInputError(f"injectivity is checked for t in [0, 1), got {t}")
    dominant = np.argmax(gamma.matrix(), axis=1)
    src = gamma.source.coordinates()
    tgt = gamma.target.coordinates()[dominant]
    images = eval_curve_arrays(src, tgt, t)
    collisions = cKDTree(images).query_pairs(r=tol, output_type="ndarray") if len(images) > 1 else np.empty((0, 2))
    residuals = np.zeros(src.shape[0])
    for a, b in collisions:
        residuals[a] = residuals[b] = 1.0
    return CheckReport.from_residuals("interpolation_injectivity", residuals, 0.0, t=t, collisions=int(len(collisions)))
