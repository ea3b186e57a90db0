from fastapi import APIRouter, Depends, HTTPException, status

from core.exceptions import InvalidInputError
from dependencies import get_game_service
from models.domain import MatrixGame
from models.models import (
    GameRequest,
    PayoffRequest,
    PayoffResponse,
    StabilityReport,
    StabilityRequest,
)
from services.game_service import GameService, expected_payoff, payoff, payoff_bound

games_router = APIRouter(prefix="/games", tags=["games"])


def game_from_request(data: GameRequest) -> MatrixGame:
    try:
        return MatrixGame.from_rows(data.payoff_matrix, name=data.name)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))


@games_router.post("/payoff", response_model=PayoffResponse)
def evaluate_payoff(data: PayoffRequest):
    game = game_from_request(data)
    try:
        return PayoffResponse(
            payoff=payoff(game, data.x).tolist(),
            expected_payoff=expected_payoff(game, data.x),
            payoff_bound=payoff_bound(game),
        )
    except InvalidInputError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))


@games_router.post(
    "/stability", response_model=StabilityReport, response_model_by_alias=True
)
def analyze_stability(
    data: StabilityRequest, games: GameService = Depends(get_game_service)
):
    game = game_from_request(data)
    return games.analyze(game, data.samples, data.seed)
