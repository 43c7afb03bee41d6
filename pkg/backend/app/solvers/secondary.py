# Secondary Variational Problem
# File: secondary.py
# Author: Transport Toolkit Team
# Date: 2026-10-06
# Purpose: Lexicographic (d, then d^2) optimal plans and a brute-force vertex oracle

import itertools
import math
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from app.core.config import settings
from app.core.exceptions import InvalidInputError, SolverError
from app.heisenberg.distance import distance_matrix
from app.measures.atomic import AtomicMeasure
from app.solvers.kantorovich import solve_emd
from app.solvers.plans import TransportPlan
from app.utils.logger import get_solver_logger

logger = get_solver_logger("secondary")

# Largest number of candidate bases enumerated by the brute-force oracle
_MAX_BASES = 250_000


def coupling_constraints(m: int, k: int) -> sparse.csr_matrix:
    """Equality rows (row sums, then column sums) for a row-major m x k coupling vector"""
    rows = sparse.kron(sparse.identity(m), np.ones((1, k)))
    cols = sparse.kron(np.ones((1, m)), sparse.identity(k))
    return sparse.vstack([rows, cols]).tocsr()


def _highs_options() -> dict:
    tol = settings.MARGINAL_TOLERANCE
    return {"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol}


def _face_tolerance(scale: float) -> float:
    return settings.OPTIMAL_FACE_TOLERANCE * max(1.0, scale)


def optimal_face(d: np.ndarray, gamma: np.ndarray, psi: np.ndarray, psi_c: np.ndarray) -> np.ndarray:
    """
    Cells that a W1-optimal coupling may charge.

    A cell is kept when its reduced cost d_ij - psi_i - psi^c_j vanishes up
    to OPTIMAL_FACE_TOLERANCE, or when the stage-1 plan already charges it.
    Every coupling supported on the mask has the stage-1 value.
    """
    reduced = d - psi[:, None] - psi_c[None, :]
    return (reduced <= _face_tolerance(float(d.max(initial=0.0)))) | (gamma > 0.0)


def solve_secondary(
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    distances: Optional[np.ndarray] = None,
) -> TransportPlan:
    """
    Lexicographic optimum over Pi(mu, nu).

    Stage 1 solves the W1 problem exactly and keeps its duals. Stage 2
    minimises the integral of d^2 over couplings supported on the optimal
    face, the cells of zero reduced cost, so the d-cost cannot drift above
    the stage-1 value.

    Raises:
        SolverError: if the stage-2 LP fails
    """
    d = distance_matrix(mu.coordinates(), nu.coordinates()) if distances is None else distances
    a, b = mu.weight_array(), nu.weight_array()
    gamma1, psi, psi_c, primary = solve_emd(a, b, d)
    face = optimal_face(d, gamma1, psi, psi_c)
    cells = np.flatnonzero(face.ravel())
    logger.info(
        f"Secondary problem {mu.size}x{nu.size}: stage-1 value {primary:.12g}, "
        f"{cells.size} of {face.size} cells on the optimal face"
    )

    m, k = d.shape
    result = linprog(
        c=(d ** 2).ravel()[cells],
        A_eq=coupling_constraints(m, k)[:, cells],
        b_eq=np.concatenate([a, b]),
        bounds=(0, None),
        method="highs-ds",
        options=_highs_options(),
    )
    if result.status != 0:
        raise SolverError(f"stage-2 LP failed: {result.message}", stage="secondary")

    gamma = np.zeros(m * k)
    gamma[cells] = np.clip(result.x, 0.0, None)
    plan = TransportPlan.from_matrix(mu, nu, gamma.reshape(m, k), floor=settings.LP_FEASIBILITY_TOLERANCE * 1e-3)
    logger.info(f"Secondary problem stage-2 value {result.fun:.12g}")
    return plan


def _lexicographic_choice(d_costs: np.ndarray, d2_costs: np.ndarray) -> int:
    """Index of the least d2-cost among candidates whose d-cost ties the minimum; first on ties"""
    d_costs = np.asarray(d_costs, dtype=float)
    lowest = float(d_costs.min())
    on_face = d_costs <= lowest + _face_tolerance(abs(lowest))
    return int(np.argmin(np.where(on_face, d2_costs, np.inf)))


def _permutation_oracle(d: np.ndarray) -> np.ndarray:
    k = d.shape[0]
    perms = np.array(list(itertools.permutations(range(k))))
    cost = d[np.arange(k), perms]
    best = perms[_lexicographic_choice(cost.sum(axis=1) / k, (cost ** 2).sum(axis=1) / k)]
    gamma = np.zeros_like(d)
    gamma[np.arange(k), best] = 1.0 / k
    return gamma


def _basis_oracle(d: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, k = d.shape
    cells = m * k
    basis_size = m + k - 1
    if math.comb(cells, basis_size) > _MAX_BASES:
        raise InvalidInputError(f"{m}x{k} instance is too large for basis enumeration")
    A = coupling_constraints(m, k).toarray()
    rhs = np.concatenate([a, b])
    vertices = []
    for basis in itertools.combinations(range(cells), basis_size):
        cols = list(basis)
        sub = A[:, cols]
        if np.linalg.matrix_rank(sub) < basis_size:
            continue
        x, *_ = np.linalg.lstsq(sub, rhs, rcond=None)
        if np.abs(sub @ x - rhs).max() > 1e-12 or x.min() < -1e-12:
            continue
        gamma = np.zeros(cells)
        gamma[cols] = np.clip(x, 0.0, None)
        vertices.append(gamma)
    if not vertices:
        raise SolverError("no feasible basis found", stage="brute_force")
    stacked = np.array(vertices)
    best = _lexicographic_choice(stacked @ d.ravel(), stacked @ (d ** 2).ravel())
    return stacked[best].reshape(m, k)


def brute_force_lexicographic(mu: AtomicMeasure, nu: AtomicMeasure) -> TransportPlan:
    """
    Exhaustive vertex search for the lexicographic problem.

    Equal-weight square instances enumerate permutations (the vertices of the
    Birkhoff polytope); other small instances enumerate feasible bases of the
    transportation polytope. Ties keep the first vertex found.
    """
    d = distance_matrix(mu.coordinates(), nu.coordinates())
    a, b = mu.weight_array(), nu.weight_array()
    uniform = mu.size == nu.size and np.allclose(a, 1.0 / mu.size) and np.allclose(b, 1.0 / nu.size)
    if uniform:
        if mu.size > 8:
            raise InvalidInputError("permutation enumeration is limited to 8 atoms per side")
        gamma = _permutation_oracle(d)
    else:
        gamma = _basis_oracle(d, a, b)
    return TransportPlan.from_matrix(mu, nu, gamma)

