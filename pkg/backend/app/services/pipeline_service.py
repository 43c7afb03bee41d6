# Pipeline Service
# File: pipeline_service.py
# Author: Transport Toolkit Team
# Date: 2026-10-11
# Purpose: Run the (P_eps) sequence end to end, check the final plan and persist every artifact

from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.config import settings
from app.diagnostics.density_checks import check_interpolant_density, check_transport_lower_density
from app.diagnostics.plan_checks import (
    check_cyclical_monotonicity,
    check_monotone_rays,
    check_plan_on_omega,
)
from app.diagnostics.reports import CheckReport, all_passed
from app.heisenberg.distance import distance_matrix
from app.measures.atomic import AtomicMeasure
from app.measures.sampled import Box
from app.schemas.documents import (
    PlanDocument,
    PlanSeriesDocument,
    ReportsDocument,
    RunConfig,
    RunManifest,
    SourceDocument,
    StepRecord,
)
from app.services import io_service
from app.solvers.penalized import c_eps_matrix
from app.solvers.sequence import SequenceResult, run_approximation_sequence
from app.utils.logger import get_service_logger

logger = get_service_logger("pipeline")

LOWER_DENSITY_DELTAS = (0.4, 0.2, 0.1)
LOWER_DENSITY_RADIUS = 0.25
INTERPOLATION_TIME = 0.5


class PipelineOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    result: SequenceResult
    reports: List[CheckReport]
    files: List[Path]

    @property
    def passed(self) -> bool:
        return all_passed(self.reports)


def default_source(n: int = 1) -> SourceDocument:
    """Uniform measure on the unit box [0, 1]^{2n+1}"""
    dim = 2 * n + 1
    return SourceDocument(lower=[0.0] * dim, upper=[1.0] * dim)


def default_target(n: int = 1, seed: Optional[int] = None, atoms: int = 5, spread: float = 0.15) -> AtomicMeasure:
    """Equal-weight cluster of atoms around the centre of the unit box"""
    rng = np.random.default_rng(settings.DEFAULT_SEED if seed is None else seed)
    coords = 0.5 + rng.uniform(-spread, spread, size=(atoms, 2 * n + 1))
    return AtomicMeasure.from_arrays(coords)


def _series_report(name: str, values: List[float], tol: float = 1e-6, nonnegative: bool = False) -> CheckReport:
    """Increases between consecutive values (and negative values when required) as residuals"""
    arr = np.asarray(values, dtype=float)
    residuals = np.diff(arr) if arr.size > 1 else np.zeros(0)
    if nonnegative:
        residuals = np.concatenate([residuals, -arr])
    return CheckReport.from_residuals(name, residuals, tol, series=arr.tolist())


def _c_eps_costs(result: SequenceResult) -> np.ndarray:
    """d + eps d^2 between the marginals of the last plan, the cost it is optimal for"""
    step = result.steps[-1]
    d = distance_matrix(step.plan.source.coordinates(), step.plan.target.coordinates())
    return c_eps_matrix(step.epsilon, d)


def _largest_moving_entry(result: SequenceResult) -> Optional[int]:
    plan = result.steps[-1].plan
    xs, ys = plan.pair_coordinates()
    moving = np.nonzero(np.abs(xs - ys).max(axis=1) > settings.OMEGA_TOLERANCE)[0]
    if moving.size == 0:
        return None
    return int(moving[np.argmax(plan.masses[moving])])


class PipelineService:
    """Runs the epsilon sequence and its checks for one RunConfig"""

    def check_sequence(self, result: SequenceResult, source: SourceDocument, config: RunConfig) -> List[CheckReport]:
        final = result.steps[-1].plan
        reports = [
            _series_report("w1_gap_series", [s.w1_gap for s in result.steps], nonnegative=True),
            _series_report("dispersion_series", [s.dispersion for s in result.steps]),
            check_monotone_rays(final),
            check_cyclical_monotonicity(final, cost=_c_eps_costs(result), seed=config.seed),
            check_plan_on_omega(final),
            check_interpolant_density(
                final,
                INTERPOLATION_TIME,
                rho_max=1.0 / source.box().volume,
                h=config.grid_h,
                seed=config.seed,
            ),
        ]
        entry = _largest_moving_entry(result)
        if entry is not None:
            reports.append(
                check_transport_lower_density(final, entry, LOWER_DENSITY_RADIUS, LOWER_DENSITY_DELTAS, seed=config.seed)
            )
        return reports

    def run(self, config: RunConfig, source: SourceDocument, nu: AtomicMeasure) -> PipelineOutcome:
        """
        Solve, check and write the run directory.

        Files: ledger.csv, plans.json (every epsilon), final_plan.json,
        reports.json and manifest.json, all under config.out.
        """
        out = Path(config.out)
        mu = source.to_sampled()
        result = run_approximation_sequence(
            mu,
            nu,
            epsilons=config.epsilons,
            N=config.N,
            seed=config.seed,
            box=Box.bounding(np.array([source.lower, source.upper]), nu.coordinates(), fraction=0.0),
        )
        reports = self.check_sequence(result, source, config)

        series = PlanSeriesDocument(
            source=result.source,
            nu=result.target,
            w1=result.w1,
            steps=[
                StepRecord(
                    epsilon=s.epsilon,
                    label=s.label,
                    breakdown=s.breakdown,
                    dispersion=s.dispersion,
                    split_mass=s.split_mass,
                    target_support=_support_indices(s.plan.target, nu),
                    entries=s.plan.entries,
                )
                for s in result.steps
            ],
        )
        final = result.steps[-1]
        failed = [r.name for r in reports if not r.passed]
        files = [
            io_service.write_csv(result.ledger(), out / "ledger.csv"),
            io_service.save_document(series, out / "plans.json"),
            io_service.save_document(PlanDocument.from_plan(final.plan, final.epsilon, final.label), out / "final_plan.json"),
            io_service.save_document(
                ReportsDocument(suite="pipeline", seed=config.seed, passed=not failed, reports=reports),
                out / "reports.json",
            ),
        ]
        manifest = RunManifest(config=config, files=[f.name for f in files], failed_checks=failed)
        files.append(io_service.save_document(manifest, out / "manifest.json"))
        logger.info(f"pipeline finished: {len(reports)} checks, {len(failed)} failed")
        return PipelineOutcome(result=result, reports=reports, files=files)


def _support_indices(support: AtomicMeasure, nu: AtomicMeasure) -> List[int]:
    """Position in nu of each atom of a marginal supported on atoms of nu"""
    nu_coords = nu.coordinates()
    out = []
    for row in support.coordinates():
        out.append(int(np.argmin(np.abs(nu_coords - row).max(axis=1))))
    return out


_pipeline_service: Optional[PipelineService] = None


def get_pipeline_service() -> PipelineService:
    global _pipeline_service
    if _pipeline_service is None:
        _pipeline_service = PipelineService()
    return _pipeline_service


def run_pipeline(config: RunConfig, source: SourceDocument, nu: AtomicMeasure) -> PipelineOutcome:
    return get_pipeline_service().run(config, source, nu)
