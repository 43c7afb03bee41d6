# Penalized Approximation
# File: penalized.py
# Author: Transport Toolkit Team
# Date: 2026-10-07
# Purpose: The c_eps cost, the four-term functional C_eps and the (P_eps) candidate search

"""
Penalized transport problems.

    c_eps(x, y) = d(x, y) + eps d(x, y)^2
    C_eps(gamma) = W1((pi_2)#gamma, nu) / eps + int d dgamma + eps int d^2 dgamma
                   + eps^k card spt (pi_2)#gamma,      k = 6n + 8 by default

(P_eps) minimises C_eps over plans with first marginal mu. The search family
is built from quantized copies of nu (greedy nets over the atoms of nu) plus nu
itself; each support is optionally re-weighted by routing mass through it.
"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.heisenberg.distance import cc_distance, distance_matrix
from app.heisenberg.group import Point
from app.measures.atomic import AtomicMeasure
from app.measures.quantization import quantize
from app.measures.sampled import Box
from app.solvers.kantorovich import plan_costs, solve_emd
from app.solvers.plans import TransportPlan
from app.utils.logger import get_solver_logger

logger = get_solver_logger("penalized")


class CepsConfig(BaseModel):
    """Parameters of one (P_eps) problem"""

    epsilon: float = Field(gt=0)
    box: Optional[Box] = Field(default=None, description="Compact set K holding both supports")
    cardinality_exponent: Optional[float] = Field(default=None, description="None means 6n+8")
    quantization_schedule: List[int] = Field(default_factory=lambda: list(settings.QUANTIZATION_SCHEDULE))
    reweighting: bool = Field(default_factory=lambda: settings.ENABLE_REWEIGHTING)

    def exponent(self, n: int) -> float:
        if self.cardinality_exponent is not None:
            return self.cardinality_exponent
        if settings.CARDINALITY_EXPONENT is not None:
            return settings.CARDINALITY_EXPONENT
        return 6.0 * n + 8.0


class CepsBreakdown(BaseModel):
    """C_eps(gamma) and its four terms"""

    epsilon: float
    w1_to_target: float
    w1_term: float
    d_cost: float
    d2_cost: float
    quadratic_term: float
    cardinality: int
    cardinality_term: float
    total: float


class PenalizedSolution(BaseModel):
    """Best plan of a (P_eps) search with the candidates it was compared against"""

    plan: TransportPlan
    breakdown: CepsBreakdown
    label: str
    candidates: List[Tuple[str, float]]


def c_eps_cost(epsilon: float, x: Point, y: Point) -> float:
    """d + eps d^2"""
    if not epsilon > 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    d = cc_distance(x, y)
    return d + epsilon * d * d


def c_eps_matrix(epsilon: float, distances: np.ndarray) -> np.ndarray:
    return distances + epsilon * distances ** 2


def _breakdown(
    cfg: CepsConfig,
    n: int,
    w1_to_target: float,
    d_cost: float,
    d2_cost: float,
    cardinality: int,
) -> CepsBreakdown:
    eps = cfg.epsilon
    w1_term = w1_to_target / eps
    quadratic = eps * d2_cost
    card_term = eps ** cfg.exponent(n) * cardinality
    return CepsBreakdown(
        epsilon=eps,
        w1_to_target=w1_to_target,
        w1_term=w1_term,
        d_cost=d_cost,
        d2_cost=d2_cost,
        quadratic_term=quadratic,
        cardinality=cardinality,
        cardinality_term=card_term,
        total=w1_term + d_cost + quadratic + card_term,
    )


def evaluate_C_eps(cfg: CepsConfig, gamma: TransportPlan, nu: AtomicMeasure) -> CepsBreakdown:
    """
    C_eps(gamma) with each term reported separately.

    Raises:
        InvalidInputError: if the second marginal of gamma leaves cfg.box
    """
    marginal = gamma.pushed_target()
    if cfg.box is not None and not np.all(cfg.box.contains(marginal.coordinates(), tol=1e-12)):
        raise InvalidInputError("second marginal of the plan leaves the compact set K")
    _, _, _, w1_value = solve_emd(
        marginal.weight_array(),
        nu.weight_array(),
        distance_matrix(marginal.coordinates(), nu.coordinates()),
    )
    d_cost, d2_cost = plan_costs(gamma)
    return _breakdown(cfg, gamma.source.n, max(w1_value, 0.0), d_cost, d2_cost, marginal.size)


# ---------------------------------------------------------------------------
# Candidate search
# ---------------------------------------------------------------------------

def _plan_on_support(
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    support: np.ndarray,
    gamma: np.ndarray,
) -> Tuple[TransportPlan, np.ndarray]:
    """Plan from mu to the atoms nu[support] carrying the column sums of gamma, with the nu indices kept"""
    mass = gamma.sum(axis=0)
    keep = mass > settings.PLAN_MASS_FLOOR
    target = AtomicMeasure.from_arrays(nu.coordinates()[support[keep]], mass[keep], normalize=True, merge=False)
    scaled = gamma[:, keep] * (target.weight_array() / mass[keep])[None, :]
    return TransportPlan.from_matrix(mu, target, scaled), support[keep]


def _routed_plan(
    cfg: CepsConfig,
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    support: np.ndarray,
    d_mu_nu: np.ndarray,
    d_nu_nu: np.ndarray,
) -> Tuple[TransportPlan, np.ndarray]:
    eps = cfg.epsilon
    # routed[i, s, j] = c_eps(x_i, F_s) + d(F_s, y_j) / eps
    first_leg = c_eps_matrix(eps, d_mu_nu[:, support])
    second_leg = d_nu_nu[support, :] / eps
    routed = first_leg[:, :, None] + second_leg[None, :, :]
    via = np.argmin(routed, axis=1)
    cost = np.take_along_axis(routed, via[:, None, :], axis=1)[:, 0, :]

    theta, _, _, _ = solve_emd(mu.weight_array(), nu.weight_array(), cost)
    gamma = np.zeros((mu.size, support.size))
    rows, cols = np.nonzero(theta > settings.PLAN_MASS_FLOOR)
    np.add.at(gamma, (rows, via[rows, cols]), theta[rows, cols])
    return _plan_on_support(mu, nu, support, gamma)


def reweight_support(
    cfg: CepsConfig,
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    support: np.ndarray,
    d_mu_nu: Optional[np.ndarray] = None,
    d_nu_nu: Optional[np.ndarray] = None,
) -> TransportPlan:
    """
    Re-optimise the masses on a fixed support F.

    Solves min sum c_eps(x_i, s) gamma_is + (1/eps) sum d(s, y_j) pi_sj over
    gamma with first marginal mu and pi with second marginal nu, the two
    sharing the marginal on F. Without capacities on F this is a transport
    problem from mu to nu with the routed cost min_s [c_eps(x_i, s) + d(s, y_j)/eps];
    ties route through the lowest support index.
    """
    support = np.asarray(support, dtype=int)
    d_mu_nu = distance_matrix(mu.coordinates(), nu.coordinates()) if d_mu_nu is None else d_mu_nu
    d_nu_nu = distance_matrix(nu.coordinates(), nu.coordinates()) if d_nu_nu is None else d_nu_nu
    return _routed_plan(cfg, mu, nu, support, d_mu_nu, d_nu_nu)[0]


def candidate_supports(cfg: CepsConfig, nu: AtomicMeasure) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    """
    Search family of second marginals.

    Returns:
        (label, indices into nu, masses) for each distinct quantized copy of nu
        along the schedule, then nu itself when no net reproduced it
    """
    coords = nu.coordinates()
    weights = nu.weight_array()
    seen = set()
    out = []
    for m in cfg.quantization_schedule:
        q = quantize(coords, m)
        support = np.asarray(q.net_indices, dtype=int)
        mass = np.zeros(support.size)
        np.add.at(mass, np.asarray(q.assignments), weights)
        key = tuple(support.tolist())
        if key in seen:
            continue
        seen.add(key)
        out.append((f"m={m}", support, mass))
    full = np.arange(nu.size)
    if tuple(full.tolist()) not in seen:
        out.append(("nu", full, weights))
    return out


def solve_P_eps(
    cfg: CepsConfig,
    mu_emp: AtomicMeasure,
    nu: AtomicMeasure,
    d_mu_nu: Optional[np.ndarray] = None,
) -> PenalizedSolution:
    """
    Best plan over the (P_eps) search family.

    For each support F in the family (greedy nets of nu over the quantization
    schedule, then nu itself) the c_eps-optimal plan onto the quantized
    marginal is computed, and optionally the re-weighted plan on F. Every
    candidate is scored by C_eps; the first candidate with the lowest total wins.

    Raises:
        InvalidInputError: on an empty quantization schedule or supports outside K
    """
    if not cfg.quantization_schedule:
        raise InvalidInputError("quantization schedule must not be empty")
    if cfg.box is not None:
        for name, measure in (("mu", mu_emp), ("nu", nu)):
            if not np.all(cfg.box.contains(measure.coordinates(), tol=1e-12)):
                raise InvalidInputError(f"support of {name} leaves the compact set K")

    d_mu_nu = distance_matrix(mu_emp.coordinates(), nu.coordinates()) if d_mu_nu is None else d_mu_nu
    d_nu_nu = distance_matrix(nu.coordinates(), nu.coordinates())
    eps = cfg.epsilon
    n = mu_emp.n

    best: Optional[Tuple[TransportPlan, CepsBreakdown, str]] = None
    scores: List[Tuple[str, float]] = []

    def consider(label: str, plan: TransportPlan, used: np.ndarray) -> None:
        nonlocal best
        _, _, _, w1_value = solve_emd(plan.target.weight_array(), nu.weight_array(), d_nu_nu[used, :])
        d_cost, d2_cost = plan_costs(plan, d_mu_nu[:, used])
        breakdown = _breakdown(cfg, n, max(w1_value, 0.0), d_cost, d2_cost, plan.target.size)
        scores.append((label, breakdown.total))
        logger.debug(f"eps={eps:g} candidate {label}: C_eps={breakdown.total:.12g} card={breakdown.cardinality}")
        if best is None or breakdown.total < best[1].total:
            best = (plan, breakdown, label)

    for label, support, mass in candidate_supports(cfg, nu):
        gamma, _, _, _ = solve_emd(mu_emp.weight_array(), mass, c_eps_matrix(eps, d_mu_nu[:, support]))
        consider(label, *_plan_on_support(mu_emp, nu, support, gamma))
        if cfg.reweighting:
            consider(f"{label}+reweight", *_routed_plan(cfg, mu_emp, nu, support, d_mu_nu, d_nu_nu))

    plan, breakdown, label = best
    logger.info(
        f"P_eps eps={eps:g}: best candidate {label} of {len(scores)}, "
        f"C_eps={breakdown.total:.12g}, card={breakdown.cardinality}"
    )
    return PenalizedSolution(plan=plan, breakdown=breakdown, label=label, candidates=scores)
