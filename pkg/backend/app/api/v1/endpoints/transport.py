# Transport Endpoints
# File: transport.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Exact discrete transport between atomic measures

from fastapi import APIRouter, HTTPException

from app.core.exceptions import InvalidInputError, SolverError
from app.schemas.documents import KantorovichResponse, TransportRequest, W1Response
from app.solvers.kantorovich import solve_kantorovich
from app.utils.logger import get_api_logger

logger = get_api_logger()
router = APIRouter()


def _solve(request: TransportRequest):
    if request.source.n != request.target.n:
        raise HTTPException(status_code=400, detail="source and target live in different groups")
    try:
        return solve_kantorovich(request.source, request.target)
    except InvalidInputError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    except SolverError as exc:
        logger.error(f"transport solve failed: {exc}")
        raise HTTPException(status_code=500, detail=str(exc))


@router.post("/w1", response_model=W1Response)
async def wasserstein_1(request: TransportRequest) -> W1Response:
    """W1 distance for the CC metric"""
    _, _, value = _solve(request)
    return W1Response(w1=value)


@router.post("/kantorovich", response_model=KantorovichResponse)
async def kantorovich(request: TransportRequest) -> KantorovichResponse:
    """Basic optimal plan for the distance cost with its certified dual potentials"""
    plan, potential, value = _solve(request)
    gap = abs(value - potential.dual_value(request.source, request.target))
    logger.info(f"kantorovich: {plan.size} entries, value {value:.12g}, duality gap {gap:.3g}")
    return KantorovichResponse(value=value, plan=plan, psi=potential.psi, psi_c=potential.psi_c, duality_gap=gap)
