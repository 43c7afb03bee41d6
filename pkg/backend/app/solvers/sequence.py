# Approximation Sequence
# File: sequence.py
# Author: Transport Toolkit Team
# Date: 2026-10-09
# Purpose: Solve (P_eps) along a decreasing schedule and tabulate the convergence ledger

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.diagnostics.plan_checks import graph_dispersion
from app.heisenberg.distance import distance_matrix
from app.measures.atomic import AtomicMeasure
from app.measures.sampled import Box, SampledMeasure, empirical
from app.solvers.interpolation import SplitReport, transport_map_extract
from app.solvers.kantorovich import solve_kantorovich_matrix
from app.solvers.penalized import CepsBreakdown, CepsConfig, solve_P_eps
from app.solvers.plans import TransportPlan
from app.utils.logger import get_solver_logger

logger = get_solver_logger("sequence")

LEDGER_COLUMNS = ["epsilon", "C_eps", "W1_to_target", "int_d", "int_d2", "W1_gap", "card", "dispersion", "split_mass", "label"]


class SequenceStep(BaseModel):
    """Solution of (P_eps) at one epsilon and the quantities tracked across the schedule"""

    epsilon: float
    plan: TransportPlan
    breakdown: CepsBreakdown
    label: str
    w1_gap: float
    dispersion: float
    split_mass: float

    @property
    def cardinality(self) -> int:
        return self.breakdown.cardinality


class SequenceResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    source: AtomicMeasure
    target: AtomicMeasure
    w1: float
    reference_plan: TransportPlan
    steps: List[SequenceStep]

    def ledger(self) -> pd.DataFrame:
        """One row per epsilon plus a final row holding the exact W1 reference"""
        rows = [
            {
                "epsilon": s.epsilon,
                "C_eps": s.breakdown.total,
                "W1_to_target": s.breakdown.w1_to_target,
                "int_d": s.breakdown.d_cost,
                "int_d2": s.breakdown.d2_cost,
                "W1_gap": s.w1_gap,
                "card": s.cardinality,
                "dispersion": s.dispersion,
                "split_mass": s.split_mass,
                "label": s.label,
            }
            for s in self.steps
        ]
        rows.append({"epsilon": 0.0, "int_d": self.w1, "W1_gap": 0.0, "label": "W1"})
        return pd.DataFrame(rows, columns=LEDGER_COLUMNS)


def _validate_schedule(epsilons: Sequence[float]) -> List[float]:
    eps = [float(e) for e in epsilons]
    if not eps:
        raise InvalidInputError("epsilon schedule must not be empty")
    if any(not e > 0 for e in eps):
        raise InvalidInputError("epsilons must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise InvalidInputError("epsilons must be strictly decreasing")
    return eps


def run_approximation_sequence(
    mu: SampledMeasure,
    nu: AtomicMeasure,
    epsilons: Optional[Sequence[float]] = None,
    N: Optional[int] = None,
    seed: Optional[int] = None,
    box: Optional[Box] = None,
    cardinality_exponent: Optional[float] = None,
    quantization_schedule: Optional[List[int]] = None,
    reweighting: Optional[bool] = None,
    workers: Optional[int] = None,
) -> SequenceResult:
    """
    Solve (P_eps) for each epsilon of a decreasing schedule against one empirical mu_N.

    The same sample is used at every epsilon so the ledger isolates the effect of
    epsilon. W1_gap is int d d gamma_eps - W1(mu_N, nu); cardinality is of the
    second marginal of gamma_eps.

    Args:
        mu: Absolutely continuous source, sampled N times
        nu: Atomic target
        workers: Threads solving epsilons concurrently; results keep schedule order

    Raises:
        InvalidInputError: on an empty, non-positive or non-decreasing schedule
    """
    eps = _validate_schedule(settings.EPSILON_SCHEDULE if epsilons is None else epsilons)
    N = settings.SAMPLE_SIZE if N is None else N
    workers = settings.PIPELINE_WORKERS if workers is None else workers
    if mu.n != nu.n:
        raise InvalidInputError(f"mu lives in H^{mu.n} but nu in H^{nu.n}")

    mu_emp = empirical(mu, N, seed=seed)
    d_mu_nu = distance_matrix(mu_emp.coordinates(), nu.coordinates())
    reference, _, w1_value = solve_kantorovich_matrix(mu_emp, nu, d_mu_nu)
    logger.info(f"sequence: N={N}, |nu|={nu.size}, W1(mu_N, nu)={w1_value:.12g}, eps={eps}")

    options = {"box": box, "cardinality_exponent": cardinality_exponent}
    if quantization_schedule is not None:
        options["quantization_schedule"] = quantization_schedule
    if reweighting is not None:
        options["reweighting"] = reweighting

    def solve(epsilon: float) -> SequenceStep:
        solution = solve_P_eps(CepsConfig(epsilon=epsilon, **options), mu_emp, nu, d_mu_nu)
        extracted = transport_map_extract(solution.plan)
        split_mass = extracted.split_mass if isinstance(extracted, SplitReport) else 0.0
        return SequenceStep(
            epsilon=epsilon,
            plan=solution.plan,
            breakdown=solution.breakdown,
            label=solution.label,
            w1_gap=solution.breakdown.d_cost - w1_value,
            dispersion=graph_dispersion(solution.plan),
            split_mass=split_mass,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            steps = list(pool.map(solve, eps))
    else:
        steps = [solve(e) for e in eps]

    gaps = np.array([s.w1_gap for s in steps])
    logger.info(f"sequence finished: W1 gaps {np.array2string(gaps, precision=6)}")
    return SequenceResult(source=mu_emp, target=nu, w1=w1_value, reference_plan=reference, steps=steps)
