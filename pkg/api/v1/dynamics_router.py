from fastapi import APIRouter, Depends, HTTPException, status

from api.v1.games_router import game_from_request
from config.settings import settings
from core.exceptions import IntegrationDivergedError, InvalidInputError
from dependencies import get_simulation_service
from models.models import (
    ReplicatorRequest,
    ReplicatorResponse,
    SimulateRequest,
    SimulationSummary,
    SolverConfig,
)
from services.dynamics_service import SimulationService, replicator_field, summarize

dynamics_router = APIRouter(prefix="/dynamics", tags=["dynamics"])


@dynamics_router.post("/simulate", response_model=SimulationSummary)
def simulate(
    data: SimulateRequest,
    simulations: SimulationService = Depends(get_simulation_service),
):
    game = game_from_request(data)
    solver = SolverConfig(
        tol=settings.SOLVER_TOL,
        max_iter=settings.SOLVER_MAX_ITER,
        damping=settings.SOLVER_DAMPING,
    )
    try:
        traj, _ = simulations.simulate(game, data.lam, data.z0, data.integrator, solver)
    except InvalidInputError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except IntegrationDivergedError as e:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(e))
    return summarize(traj)


@dynamics_router.post("/replicator", response_model=ReplicatorResponse)
def evaluate_replicator(data: ReplicatorRequest):
    try:
        field = replicator_field(data.x, data.u, data.lam)
    except InvalidInputError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    return ReplicatorResponse(field=field.tolist())
