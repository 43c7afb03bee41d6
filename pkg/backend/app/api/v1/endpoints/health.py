# Health Endpoints
# File: health.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Health check endpoint for the transport toolkit API

from typing import Any, Dict

import numpy as np
import ot
import scipy
from fastapi import APIRouter

from app.core.config import settings
from app.utils.logger import get_api_logger

logger = get_api_logger()
router = APIRouter()


@router.get("/", summary="Health check endpoint")
async def health_check() -> Dict[str, Any]:
    """
    Basic health check endpoint.

    Returns:
        Dict with status, version and the numerical backends in use
    """
    logger.info("Health check requested")
    return {
        "status": "healthy",
        "service": "heisenberg-transport-toolkit",
        "version": settings.VERSION,
        "schema_version": settings.SCHEMA_VERSION,
        "backends": {"numpy": np.__version__, "scipy": scipy.__version__, "pot": ot.__version__},
    }
