# Check Reports
# File: reports.py
# Author: Transport Toolkit Team
# Date: 2026-10-08
# Purpose: Result type shared by every diagnostic check

from typing import Any, Dict, Iterable, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.utils.logger import get_diagnostics_logger

logger = get_diagnostics_logger("reports")


class CheckReport(BaseModel):
    """
    Outcome of one diagnostic.

    Serialises with the key "pass" for the verdict. Statistical checks compare
    Monte Carlo estimates against bands; the rest compare residuals against a
    fixed tolerance.
    """

    model_config = ConfigDict(populate_by_name=True)

    name: str
    trials: int = Field(ge=0)
    violations: int = Field(ge=0)
    worst_violation: float = 0.0
    tolerance: float
    passed: bool = Field(alias="pass")
    statistical: bool = False
    details: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _verdict_matches_count(self) -> "CheckReport":
        if self.passed != (self.violations == 0):
            raise ValueError("a check passes exactly when it has no violations")
        return self

    @classmethod
    def from_residuals(
        cls,
        name: str,
        residuals: Iterable[float],
        tolerance: float,
        statistical: bool = False,
        **details: Any,
    ) -> "CheckReport":
        """Count residuals above tolerance; worst_violation is the largest residual seen"""
        values = np.asarray(residuals if isinstance(residuals, np.ndarray) else list(residuals), dtype=float)
        violations = int(np.count_nonzero(~(values <= tolerance))) if values.size else 0
        worst = float(np.nanmax(values)) if values.size and not np.all(np.isnan(values)) else 0.0
        report = cls(
            name=name,
            trials=int(values.size),
            violations=violations,
            worst_violation=worst,
            tolerance=tolerance,
            passed=violations == 0,
            statistical=statistical,
            details=details,
        )
        report.log()
        return report

    def log(self) -> None:
        verdict = "PASS" if self.passed else "FAIL"
        logger.info(
            f"{self.name}: {verdict} trials={self.trials} violations={self.violations} "
            f"worst={self.worst_violation:.3g} tol={self.tolerance:.3g}"
        )

    def summary_row(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "pass": self.passed,
            "statistical": self.statistical,
            "trials": self.trials,
            "violations": self.violations,
            "worst_violation": self.worst_violation,
            "tolerance": self.tolerance,
        }


def all_passed(reports: List[CheckReport]) -> bool:
    return all(r.passed for r in reports)
