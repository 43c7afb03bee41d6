# Geometry Endpoints
# File: geometry.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Distance and minimal-curve endpoints

from fastapi import APIRouter, HTTPException

from app.core.exceptions import CenterLineError
from app.heisenberg.distance import cc_distance
from app.heisenberg.geodesics import curve_rows, minimal_curve
from app.heisenberg.group import Point
from app.schemas.documents import DistanceResponse, GeodesicRequest, GeodesicResponse, PointPairRequest
from app.utils.logger import get_api_logger

logger = get_api_logger()
router = APIRouter()


def _points(request: PointPairRequest) -> tuple:
    try:
        x, y = Point.from_array(request.x), Point.from_array(request.y)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    if x.n != y.n:
        raise HTTPException(status_code=400, detail=f"x lives in H^{x.n} but y in H^{y.n}")
    return x, y


@router.post("/distance", response_model=DistanceResponse)
async def distance(request: PointPairRequest) -> DistanceResponse:
    """Carnot-Caratheodory distance d(x, y)"""
    x, y = _points(request)
    return DistanceResponse(distance=cc_distance(x, y))


@router.post("/geodesic", response_model=GeodesicResponse)
async def geodesic(request: GeodesicRequest) -> GeodesicResponse:
    """
    Minimal curve from x to y sampled at steps+1 parameters.

    Points sharing a center line get the canonical curve unless strict is set,
    in which case the request fails with 400.
    """
    x, y = _points(request)
    curve = minimal_curve(x, y)
    if request.strict and curve.canonical_selection:
        raise HTTPException(status_code=400, detail=str(CenterLineError("minimal curve from x to y is not unique")))
    rows, canonical = curve_rows(x, y, request.steps)
    logger.info(f"geodesic: length {curve.length:.6g}, {len(rows)} rows, canonical={canonical}")
    return GeodesicResponse(length=curve.length, canonical_selection=canonical, rows=rows)
