# Configuration settings
# File: config.py
# Author: Transport Toolkit Team
# Date: 2026-10-02
# Purpose: Configuration settings for the Heisenberg transport toolkit

import os
from typing import List, Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Application settings
    PROJECT_NAME: str = "Heisenberg Transport Toolkit"
    PROJECT_DESCRIPTION: str = "Optimal transport in the Heisenberg group with exact Carnot-Caratheodory geometry"
    VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"
    API_V1_STR: str = "/api/v1"
    SHOW_DOCS: bool = True

    # Server settings
    HOST: str = "127.0.0.1"
    PORT: int = 8000
    RELOAD: bool = False

    # CORS settings
    BACKEND_CORS_ORIGINS: List[str] = ["http://localhost:3000", "http://127.0.0.1:3000"]
    CORS_CREDENTIALS: bool = True
    CORS_METHODS: List[str] = ["GET", "POST", "OPTIONS"]
    CORS_HEADERS: List[str] = ["*"]

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_TO_FILE: bool = False
    LOG_DIR: str = "logs"

    # Group geometry
    GROUP_DIMENSION: int = 1
    OMEGA_TOLERANCE: float = 1e-10
    SMALL_PHI_THRESHOLD: float = 1e-4
    RATIO_SERIES_THRESHOLD: float = 1e-2
    ROOT_XTOL: float = 1e-13
    PHI_BRACKET_MARGIN: float = 1e-12
    NEWTON_MAX_ITER: int = 100

    # Measures
    ATOM_MERGE_TOLERANCE: float = 1e-12
    WEIGHT_SUM_TOLERANCE: float = 1e-12
    BOX_INFLATION: float = 0.1

    # Linear programming
    MARGINAL_TOLERANCE: float = 1e-10
    LP_FEASIBILITY_TOLERANCE: float = 1e-9
    OPTIMAL_FACE_TOLERANCE: float = 1e-12
    PLAN_MASS_FLOOR: float = 1e-15
    EMD_MAX_ITER: int = 1000000

    # Variational approximation
    EPSILON_SCHEDULE: List[float] = [0.5, 0.2, 0.1, 0.05, 0.02]
    QUANTIZATION_SCHEDULE: List[int] = [1, 2, 4, 8, 16]
    CARDINALITY_EXPONENT: Optional[float] = None  # None means 6n+8
    ENABLE_REWEIGHTING: bool = False
    SAMPLE_SIZE: int = 2000
    PIPELINE_WORKERS: int = 1

    # Diagnostics
    DEFAULT_SEED: int = 0
    GRID_H: float = 0.2
    CURVE_SAMPLES: int = 64
    TUBE_FRACTION: float = 0.05
    LOWER_DENSITY_SAMPLES: int = 2000
    MCP_SAMPLES: int = 100000
    BALL_VOLUME_SAMPLES: int = 1000000
    STAT_BAND: float = 3.0
    DENSITY_ALPHA: float = 1e-3
    FD_STEP: float = 1e-5

    # Output
    OUTPUT_DIR: str = "runs"
    SCHEMA_VERSION: str = "1.0"

    model_config = SettingsConfigDict(
        env_file=os.path.join(os.path.dirname(__file__), "..", "..", ".env"),
        case_sensitive=True,
        extra="ignore",
    )


# Create settings instance - loads from .env file if present
settings = Settings()
