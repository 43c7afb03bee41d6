# Kantorovich Solver
# File: kantorovich.py
# Author: Transport Toolkit Team
# Date: 2026-10-06
# Purpose: Exact discrete optimal transport through POT's network simplex with certified duals

from typing import Callable, Optional, Tuple

import numpy as np
import ot

from app.core.config import settings
from app.core.exceptions import InfeasibleProblemError, InvalidInputError, SolverError
from app.heisenberg.distance import cc_norm_arrays, distance_matrix
from app.heisenberg.group import Point, mul_arrays
from app.measures.atomic import AtomicMeasure
from app.solvers.plans import DualPotential, TransportPlan
from app.utils.logger import get_solver_logger

logger = get_solver_logger("kantorovich")

CostFunction = Callable[[Point, Point], float]


def cost_matrix(mu: AtomicMeasure, nu: AtomicMeasure, cost: Optional[CostFunction] = None) -> np.ndarray:
    """
    Matrix c(x_i, y_j); the CC distance when cost is omitted.

    Raises:
        InvalidInputError: on NaN or infinite costs
    """
    if cost is None:
        matrix = distance_matrix(mu.coordinates(), nu.coordinates())
    else:
        matrix = np.array([[cost(x, y) for y in nu.atoms] for x in mu.atoms], dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError("cost must be finite on the product of the supports")
    return matrix


def c_transform(psi: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """psi^c(y_j) = min_i c_ij - psi_i"""
    return (cost - psi[:, None]).min(axis=0)


def polish_duals(psi: np.ndarray, psi_c: np.ndarray, cost: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Double c-transform of a feasible dual pair.

    The dual value does not decrease, feasibility is kept, and psi becomes a
    c-transform of psi_c (1-Lipschitz for the distance cost).
    """
    psi_c = c_transform(psi, cost)
    psi = (cost - psi_c[None, :]).min(axis=1)
    return psi, psi_c


def solve_emd(a: np.ndarray, b: np.ndarray, cost: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """
    Network simplex on raw arrays.

    Returns:
        (coupling matrix, psi, psi_c, primal value)

    Raises:
        InfeasibleProblemError: if the masses disagree
        SolverError: if the simplex stops without an optimal basis
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if abs(a.sum() - b.sum()) > settings.WEIGHT_SUM_TOLERANCE * max(a.size, b.size):
        raise InfeasibleProblemError(f"total masses differ: {a.sum():.15g} vs {b.sum():.15g}", stage="kantorovich")

    gamma, log = ot.emd(a, b, cost, numItermax=settings.EMD_MAX_ITER, log=True)
    if log.get("warning") is not None or int(log.get("result_code", 1)) != 1:
        raise SolverError(f"network simplex did not reach an optimum: {log.get('warning')}", stage="kantorovich")

    psi, psi_c = polish_duals(np.asarray(log["u"], dtype=float), np.asarray(log["v"], dtype=float), cost)
    return gamma, psi, psi_c, float(np.sum(gamma * cost))


def solve_kantorovich_matrix(
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    cost: np.ndarray,
) -> Tuple[TransportPlan, DualPotential, float]:
    """solve_kantorovich for a precomputed cost matrix"""
    gamma, psi, psi_c, value = solve_emd(mu.weight_array(), nu.weight_array(), cost)
    plan = TransportPlan.from_matrix(mu, nu, gamma)
    potential = DualPotential(psi=psi.tolist(), psi_c=psi_c.tolist())
    gap = value - potential.dual_value(mu, nu)
    logger.debug(f"Kantorovich {mu.size}x{nu.size}: value={value:.12g} gap={gap:.3g} entries={plan.size}")
    return plan, potential, value


def solve_kantorovich(
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    cost: Optional[CostFunction] = None,
) -> Tuple[TransportPlan, DualPotential, float]:
    """
    min over gamma in Pi(mu, nu) of sum c(x_i, y_j) gamma_ij.

    Args:
        mu: Source measure
        nu: Target measure
        cost: Pointwise cost; the CC distance when omitted

    Returns:
        (basic optimal plan, polished dual potentials, optimal value)
    """
    return solve_kantorovich_matrix(mu, nu, cost_matrix(mu, nu, cost))


def w1(mu: AtomicMeasure, nu: AtomicMeasure) -> float:
    """Wasserstein-1 distance for the CC metric"""
    return solve_kantorovich(mu, nu)[2]


def plan_costs(gamma: TransportPlan, distances: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """
    (integral of d, integral of d^2) against gamma.

    Args:
        distances: Optional precomputed d(x_i, y_j) matrix
    """
    if distances is None:
        xs, ys = gamma.pair_coordinates()
        d = cc_norm_arrays(mul_arrays(-xs, ys))
    else:
        d = distances[gamma.rows, gamma.cols]
    mass = gamma.masses
    return float(mass @ d), float(mass @ d ** 2)


def monge_cost(gamma: TransportPlan) -> float:
    """integral of d against gamma"""
    return plan_costs(gamma)[0]
