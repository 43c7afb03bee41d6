# Verify Service
# File: verify_service.py
# Author: Transport Toolkit Team
# Date: 2026-10-11
# Purpose: Assemble the geometry, transport and density diagnostic suites

from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.diagnostics.density_checks import (
    check_interpolant_density,
    check_mcp_contraction,
    check_transport_lower_density,
)
from app.diagnostics.geometry_checks import check_ball_scaling, check_geometry_properties, check_nonbranching
from app.diagnostics.plan_checks import (
    check_cyclical_monotonicity,
    check_interpolation_injectivity,
    check_monotone_rays,
    check_plan_on_omega,
    check_potential_lipschitz_and_gradient,
)
from app.diagnostics.reports import CheckReport
from app.heisenberg.distance import distance_matrix
from app.heisenberg.group import Point
from app.measures.atomic import AtomicMeasure
from app.measures.quantization import pushforward_quantize, quantize
from app.measures.sampled import Box
from app.services.pipeline_service import default_source, default_target
from app.solvers.kantorovich import plan_costs, solve_kantorovich, solve_kantorovich_matrix, w1
from app.solvers.penalized import c_eps_matrix
from app.solvers.plans import TransportPlan
from app.solvers.secondary import brute_force_lexicographic, solve_secondary
from app.solvers.sequence import run_approximation_sequence
from app.utils.logger import get_service_logger

logger = get_service_logger("verify")

SUITES = ("geometry", "transport", "density", "all")

# (lower corner, upper corner, y, t); the last box sits next to the center line of y
MCP_CONFIGURATIONS = [
    ((0.4, -0.1, -0.1), (0.6, 0.1, 0.1), (0.0, 0.0, 0.0), 0.5),
    ((0.2, 0.2, 0.0), (0.5, 0.4, 0.3), (0.0, 0.0, 0.0), 0.25),
    ((-1.0, 0.5, 0.2), (-0.8, 0.7, 0.4), (0.3, -0.2, 0.5), 0.75),
    ((0.0, 0.0, 1.0), (0.3, 0.3, 1.2), (1.0, 1.0, -1.0), 0.5),
    ((0.01, -0.05, 0.0), (0.06, 0.05, 0.1), (0.0, 0.0, 0.0), 0.5),
]


def _random_measure(rng: np.random.Generator, size: int, n: int, uniform: bool = False) -> AtomicMeasure:
    coords = rng.normal(size=(size, 2 * n + 1))
    weights = None if uniform else rng.uniform(0.1, 1.0, size=size)
    return AtomicMeasure.from_arrays(coords, weights, normalize=True)


def geometry_suite(seed: int, n: int = 1) -> List[CheckReport]:
    reports = check_geometry_properties(seed=seed, n=n)
    reports.append(check_nonbranching(trials=500, n=n, seed=seed))
    reports.append(check_ball_scaling(n=n, samples=settings.BALL_VOLUME_SAMPLES, seed=seed))
    return reports


def transport_suite(seed: int, n: int = 1, instances: int = 50, max_atoms: int = 100) -> List[CheckReport]:
    """
    Exact LP duality and cyclical monotonicity on random instances, the
    secondary solver against exhaustive vertex search, and quantization bounds.
    """
    rng = np.random.default_rng(seed)
    gaps, feasibility, slackness = [], [], []
    monotonicity: List[CheckReport] = []
    for _ in range(instances):
        mu = _random_measure(rng, int(rng.integers(2, max_atoms + 1)), n)
        nu = _random_measure(rng, int(rng.integers(2, max_atoms + 1)), n)
        cost = distance_matrix(mu.coordinates(), nu.coordinates())
        plan, potential, value = solve_kantorovich_matrix(mu, nu, cost)
        gaps.append(abs(value - potential.dual_value(mu, nu)))
        feasibility.append(potential.feasibility_violation(cost))
        slackness.append(potential.slackness_violation(cost, plan))
        monotonicity.append(check_cyclical_monotonicity(plan, cost, max_cycle=3, trials=200, seed=seed))

    reports = [
        CheckReport.from_residuals("kantorovich_duality_gap", gaps, 1e-9, instances=instances),
        CheckReport.from_residuals("kantorovich_dual_feasibility", feasibility, 1e-9),
        CheckReport.from_residuals("kantorovich_complementary_slackness", slackness, 1e-9),
        CheckReport.from_residuals(
            "cyclical_monotonicity_instances",
            [r.violations for r in monotonicity],
            0.0,
            cycles=sum(r.trials for r in monotonicity),
        ),
        _secondary_report(rng, n),
        _quantization_report(rng, n),
    ]

    mu = _random_measure(rng, 40, n, uniform=True)
    nu = _random_measure(rng, 40, n, uniform=True)
    plan, potential, _ = solve_kantorovich(mu, nu)
    reports.extend([
        check_monotone_rays(plan),
        check_plan_on_omega(plan),
        check_potential_lipschitz_and_gradient(potential, plan, gradient=False),
        check_interpolation_injectivity(plan, 0.5),
    ])
    return reports


def _secondary_report(rng: np.random.Generator, n: int) -> CheckReport:
    """solve_secondary against brute_force_lexicographic on instances with at most six atoms per side"""
    shapes = [(k, k, True) for k in range(2, 7)] + [(2, 3, False), (3, 3, False), (3, 4, False), (4, 4, False)]
    residuals = []
    for m, k, uniform in shapes:
        mu = _random_measure(rng, m, n, uniform)
        nu = _random_measure(rng, k, n, uniform)
        d = distance_matrix(mu.coordinates(), nu.coordinates())
        found = plan_costs(solve_secondary(mu, nu, d), d)
        oracle = plan_costs(brute_force_lexicographic(mu, nu), d)
        residuals.append(max(abs(found[0] - oracle[0]), abs(found[1] - oracle[1])))
    return CheckReport.from_residuals("secondary_matches_oracle", residuals, 1e-9, instances=len(shapes))


def _quantization_report(rng: np.random.Generator, n: int, atoms: int = 20) -> CheckReport:
    """Covering radius below 1/m and W1(nu, nu_m) <= 1/m for m in 1, 2, 4, 8"""
    nu = _random_measure(rng, atoms, n)
    residuals, radii, distances = [], [], []
    for m in (1, 2, 4, 8):
        q = quantize(nu.coordinates(), m)
        nu_m = pushforward_quantize(nu, q)
        w = w1(nu, nu_m)
        radii.append(q.covering_radius)
        distances.append(w)
        residuals.extend([q.covering_radius - 1.0 / m, w - 1.0 / m])
    return CheckReport.from_residuals("quantization_bounds", residuals, 0.0, covering_radii=radii, w1=distances)


def density_suite(seed: int, n: int = 1) -> List[CheckReport]:
    """MCP contraction on fixed configurations, interpolant density and lower density on a pipeline plan"""
    if n != 1:
        raise InvalidInputError("the density suite runs in H^1")
    reports = []
    for k, (lower, upper, y, t) in enumerate(MCP_CONFIGURATIONS):
        reports.append(
            check_mcp_contraction(Box(lower=lower, upper=upper), Point.from_array(y), t, seed=seed + k)
        )

    source = default_source(n)
    nu = default_target(n, seed=seed)
    result = run_approximation_sequence(source.to_sampled(), nu, N=1000, seed=seed, box=source.box())
    final = result.steps[-1].plan
    reports.append(check_interpolant_density(final, 0.5, rho_max=1.0 / source.box().volume, seed=seed))
    entry = int(np.argmax(final.masses))
    reports.append(check_transport_lower_density(final, entry, 0.25, (0.4, 0.2, 0.1), seed=seed))
    return reports


_SUITE_BUILDERS: Dict[str, Callable[[int, int], List[CheckReport]]] = {
    "geometry": geometry_suite,
    "transport": transport_suite,
    "density": density_suite,
}


def run_suite(suite: str, seed: Optional[int] = None, n: int = 1) -> List[CheckReport]:
    """
    Run one suite, or every suite for "all".

    Raises:
        InvalidInputError: on an unknown suite name
    """
    if suite not in SUITES:
        raise InvalidInputError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    seed = settings.DEFAULT_SEED if seed is None else seed
    names = list(_SUITE_BUILDERS) if suite == "all" else [suite]
    reports: List[CheckReport] = []
    for name in names:
        logger.info(f"running {name} suite (seed={seed}, n={n})")
        reports.extend(_SUITE_BUILDERS[name](seed, n))
    return reports


def check_plan_document(
    plan: TransportPlan, seed: Optional[int] = None, epsilon: Optional[float] = None
) -> List[CheckReport]:
    """Structural checks for a plan read from disk; a plan solved at epsilon is checked against d + eps d^2"""
    seed = settings.DEFAULT_SEED if seed is None else seed
    cost = distance_matrix(plan.source.coordinates(), plan.target.coordinates())
    if epsilon is not None:
        cost = c_eps_matrix(epsilon, cost)
    return [
        check_cyclical_monotonicity(plan, cost, seed=seed),
        check_monotone_rays(plan),
        check_plan_on_omega(plan),
    ]


def summary_frame(reports: List[CheckReport]) -> pd.DataFrame:
    return pd.DataFrame([r.summary_row() for r in reports])
