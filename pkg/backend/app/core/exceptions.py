# Exceptions
# File: exceptions.py
# Author: Transport Toolkit Team
# Date: 2026-10-02
# Purpose: Error hierarchy shared by geometry, solvers, diagnostics and the CLI

from typing import Optional


class HeisenbergError(Exception):
    """Base class for all toolkit errors"""


class InvalidInputError(HeisenbergError, ValueError):
    """Malformed or out-of-contract input (CLI exit code 1)"""


class CenterLineError(InvalidInputError):
    """A point lies on the center line where a unique minimal curve is required"""


class CoverageError(InvalidInputError):
    """A point is not covered by a quantization net"""


class SolverError(HeisenbergError, RuntimeError):
    """
    A numerical solver failed (CLI exit code 2).

    Args:
        message: Human readable description
        stage: Name of the pipeline stage that failed
    """

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.stage = stage or "solver"

    def __str__(self) -> str:
        return f"[{self.stage}] {super().__str__()}"


class InfeasibleProblemError(SolverError):
    """Transport problem has no feasible coupling"""
