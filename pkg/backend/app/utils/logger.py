# Logging configuration
# File: logger.py
# Author: Transport Toolkit Team
# Date: 2026-10-02
# Purpose: Setup logging for the Heisenberg transport toolkit

import logging
import sys
import os
from datetime import datetime
from pathlib import Path
from typing import Optional

from app.core.config import settings

# Get current date for log filename
current_date = datetime.now().strftime("%Y-%m-%d")

_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(message)s"
_DATEFMT = "%Y-%m-%d %H:%M:%S"


def _logs_dir() -> Path:
    logs_dir = Path(settings.LOG_DIR)
    if not logs_dir.is_absolute():
        logs_dir = Path(__file__).parent.parent.parent / logs_dir
    logs_dir.mkdir(parents=True, exist_ok=True)
    return logs_dir


def setup_logger(name: str, log_file: Optional[str] = None) -> logging.Logger:
    """
    Set up a logger with console and optional file handlers

    Args:
        name: Logger name
        log_file: Optional specific log filename

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO))

    # Handlers are installed once per logger name
    if getattr(logger, "_toolkit_configured", False):
        return logger

    formatter = logging.Formatter(_FORMAT, datefmt=_DATEFMT)

    # stderr keeps CLI stdout reserved for data
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if settings.LOG_TO_FILE:
        if log_file is None:
            module_name = name.split(".")[-1]
            log_file = f"{current_date}_{module_name}.log"
        file_handler = logging.FileHandler(os.path.join(_logs_dir(), log_file))
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    # Don't propagate to root logger
    logger.propagate = False
    logger._toolkit_configured = True

    return logger


def get_solver_logger(solver_name: str) -> logging.Logger:
    """Get a logger for a transport solver"""
    return setup_logger(f"app.solvers.{solver_name}", f"{current_date}_solver_{solver_name}.log")


def get_diagnostics_logger(check_name: str) -> logging.Logger:
    """Get a logger for a diagnostic check"""
    return setup_logger(f"app.diagnostics.{check_name}", f"{current_date}_check_{check_name}.log")


def get_api_logger() -> logging.Logger:
    """Get a logger for API endpoints"""
    return setup_logger("app.api", f"{current_date}_api.log")


def get_service_logger(service_name: str) -> logging.Logger:
    """Get a logger for a specific service"""
    return setup_logger(f"app.services.{service_name}", f"{current_date}_service_{service_name}.log")
