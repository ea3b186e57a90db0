from fastapi import APIRouter, Depends, HTTPException, status

from api.v1.games_router import game_from_request
from core.exceptions import InvalidInputError, SolverDivergedError
from dependencies import get_equilibrium_service
from models.models import EquilibriumRecord, EquilibriumRequest
from services.equilibrium_service import EquilibriumService

equilibrium_router = APIRouter(prefix="/equilibrium", tags=["equilibrium"])


@equilibrium_router.post(
    "", response_model=EquilibriumRecord, response_model_by_alias=True
)
def solve_equilibrium(
    data: EquilibriumRequest,
    equilibria: EquilibriumService = Depends(get_equilibrium_service),
):
    game = game_from_request(data)
    try:
        record = equilibria.solve(game, data.lam, data.z0, data.solver)
    except InvalidInputError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    except SolverDivergedError as e:
        raise HTTPException(status_code=status.HTTP_409_CONFLICT, detail=str(e))
    if not record.converged:
        raise HTTPException(
            status_code=status.HTTP_409_CONFLICT,
            detail=f"not converged after {record.iterations} iterations "
            f"(residual {record.residual:.3e})",
        )
    return record
