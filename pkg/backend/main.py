# Main FastAPI application
# File: main.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Entry point for the FastAPI application serving the transport toolkit

"""
Heisenberg Transport Toolkit Backend Application

Serves distances, minimal curves and exact discrete transport over HTTP. The
app carries CORS, a request timing middleware and JSON error handlers; the
routes live under settings.API_V1_STR.
"""

import time

import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.api.v1.api import api_router
from app.core.config import settings
from app.core.exceptions import InvalidInputError, SolverError
from app.utils.logger import setup_logger

logger = setup_logger(__name__)

app = FastAPI(
    title=settings.PROJECT_NAME,
    description=settings.PROJECT_DESCRIPTION,
    version=settings.VERSION,
    docs_url="/api/docs" if settings.SHOW_DOCS else None,
    redoc_url="/api/redoc" if settings.SHOW_DOCS else None,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.BACKEND_CORS_ORIGINS,
    allow_credentials=settings.CORS_CREDENTIALS,
    allow_methods=settings.CORS_METHODS,
    allow_headers=settings.CORS_HEADERS,
)


@app.middleware("http")
async def add_process_time_header(request: Request, call_next):
    """Time each request and report it in the X-Process-Time header"""
    start_time = time.time()
    logger.info(f"[REQUEST] {request.method} {request.url.path}")
    response = await call_next(request)
    process_time = time.time() - start_time
    response.headers["X-Process-Time"] = str(process_time)
    logger.info(f"[RESPONSE] Status: {response.status_code} | Time: {process_time:.3f}s")
    return response


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """422 with the pydantic error list; malformed points and measures land here"""
    logger.error(f"[422 ERROR] {request.method} {request.url.path}: {len(exc.errors())} validation errors")
    for error in exc.errors():
        logger.debug(f"[422 ERROR] {error.get('loc')}: {error.get('msg')}")
    return JSONResponse(status_code=422, content={"detail": jsonable_errors(exc)})


@app.exception_handler(InvalidInputError)
async def invalid_input_handler(request: Request, exc: InvalidInputError):
    logger.error(f"[400 ERROR] {request.url.path}: {exc}")
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(SolverError)
async def solver_error_handler(request: Request, exc: SolverError):
    logger.error(f"[500 ERROR] {request.url.path}: {exc}")
    return JSONResponse(status_code=500, content={"detail": str(exc), "stage": exc.stage})


def jsonable_errors(exc: RequestValidationError) -> list:
    """Error entries with the offending input and context reduced to strings"""
    return [
        {"loc": list(e.get("loc", ())), "msg": str(e.get("msg")), "type": e.get("type")}
        for e in exc.errors()
    ]


app.include_router(api_router, prefix=settings.API_V1_STR)


@app.get("/")
def root():
    """Root endpoint with API information"""
    return {
        "message": settings.PROJECT_NAME,
        "version": settings.VERSION,
        "api": settings.API_V1_STR,
    }


if __name__ == "__main__":
    uvicorn.run(
        "main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.RELOAD,
        log_level=settings.LOG_LEVEL.lower(),
    )
