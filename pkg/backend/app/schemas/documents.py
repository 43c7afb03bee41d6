# Document Schemas
# File: documents.py
# Author: Transport Toolkit Team
# Date: 2026-10-10
# Purpose: Schema-versioned JSON documents for measures, plans, runs and check reports

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, ValidationError, field_validator, model_validator

from app.core.config import settings
from app.diagnostics.reports import CheckReport
from app.measures.atomic import AtomicMeasure
from app.measures.sampled import Box, SampledMeasure, uniform_box
from app.solvers.penalized import CepsBreakdown
from app.solvers.plans import TransportPlan


class Document(BaseModel):
    """Envelope shared by every persisted JSON file"""

    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)

    @field_validator("schema_version")
    @classmethod
    def _check_major(cls, version: str) -> str:
        if version.split(".")[0] != settings.SCHEMA_VERSION.split(".")[0]:
            raise ValueError(f"unsupported schema_version {version} (expected {settings.SCHEMA_VERSION})")
        return version


class MeasureDocument(Document):
    """{atoms: [[coords]...], weights: [...]}"""

    atoms: List[List[float]]
    weights: List[float]

    @model_validator(mode="after")
    def _check_measure(self) -> "MeasureDocument":
        try:
            self.to_measure()
        except ValidationError as exc:
            raise ValueError(exc.errors()[0]["msg"]) from None
        return self

    def to_measure(self) -> AtomicMeasure:
        return AtomicMeasure(atoms=self.atoms, weights=self.weights)

    @classmethod
    def from_measure(cls, measure: AtomicMeasure) -> "MeasureDocument":
        return cls(atoms=measure.coordinates().tolist(), weights=measure.weights)


class SourceDocument(Document):
    """Absolutely continuous source measure: uniform on a box"""

    kind: Literal["uniform_box"] = "uniform_box"
    lower: List[float]
    upper: List[float]

    def box(self) -> Box:
        return Box(lower=tuple(self.lower), upper=tuple(self.upper))

    def to_sampled(self) -> SampledMeasure:
        return uniform_box(self.box())


class PlanDocument(Document):
    """{source, target, entries: [[i, j, mass]...]}; marginals are re-validated on load"""

    source: AtomicMeasure
    target: AtomicMeasure
    entries: List[Tuple[int, int, float]]
    epsilon: Optional[float] = None
    label: Optional[str] = None

    @model_validator(mode="after")
    def _check_plan(self) -> "PlanDocument":
        try:
            self.to_plan()
        except ValidationError as exc:
            raise ValueError(exc.errors()[0]["msg"]) from None
        return self

    def to_plan(self) -> TransportPlan:
        return TransportPlan(source=self.source, target=self.target, entries=self.entries)

    @classmethod
    def from_plan(cls, plan: TransportPlan, epsilon: Optional[float] = None, label: Optional[str] = None) -> "PlanDocument":
        return cls(source=plan.source, target=plan.target, entries=plan.entries, epsilon=epsilon, label=label)


class StepRecord(BaseModel):
    epsilon: float
    label: str
    breakdown: CepsBreakdown
    dispersion: float
    split_mass: float
    target_support: List[int] = Field(description="Indices into nu of the plan's second marginal")
    entries: List[Tuple[int, int, float]]


class PlanSeriesDocument(Document):
    """All plans of an epsilon sequence over one shared empirical source"""

    source: AtomicMeasure
    nu: AtomicMeasure
    w1: float
    steps: List[StepRecord]


class ReportsDocument(Document):
    suite: str
    seed: int
    passed: bool
    reports: List[CheckReport]


class RunConfig(BaseModel):
    """Parameters of one hcli run; defaults come from settings"""

    n: PositiveInt = Field(default_factory=lambda: settings.GROUP_DIMENSION)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)
    epsilons: List[PositiveFloat] = Field(default_factory=lambda: list(settings.EPSILON_SCHEDULE), min_length=1)
    N: PositiveInt = Field(default_factory=lambda: settings.SAMPLE_SIZE)
    grid_h: PositiveFloat = Field(default_factory=lambda: settings.GRID_H)
    out: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    strict: bool = False


class RunManifest(Document):
    """Written next to the outputs of a pipeline run"""

    config: RunConfig
    files: List[str]
    failed_checks: List[str] = Field(default_factory=list)


# API payloads

class PointPairRequest(BaseModel):
    x: List[float]
    y: List[float]


class DistanceResponse(BaseModel):
    distance: float


class GeodesicRequest(PointPairRequest):
    steps: int = Field(default=16, ge=2)
    strict: bool = False


class GeodesicResponse(BaseModel):
    length: float
    canonical_selection: bool
    rows: List[List[float]] = Field(description="[s, coords...] for s = 0..1")


class TransportRequest(BaseModel):
    source: AtomicMeasure
    target: AtomicMeasure


class W1Response(BaseModel):
    w1: float


class KantorovichResponse(BaseModel):
    value: float
    plan: TransportPlan
    psi: List[float]
    psi_c: List[float]
    duality_gap: float
