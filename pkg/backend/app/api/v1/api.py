# API Router
# File: api.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Central API router for the transport toolkit backend

from fastapi import APIRouter

from app.api.v1.endpoints import geometry, health, transport

# Create main API router
api_router = APIRouter()

api_router.include_router(health.router, prefix="/health", tags=["health"])
api_router.include_router(geometry.router, prefix="/geometry", tags=["geometry"])
api_router.include_router(transport.router, prefix="/transport", tags=["transport"])
