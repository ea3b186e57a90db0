from fastapi import Depends

from repositories.game_repository import GameRepository
from repositories.report_repository import ReportRepository
from repositories.trajectory_repository import TrajectoryRepository
from services.dynamics_service import SimulationService
from services.equilibrium_service import EquilibriumService
from services.game_service import GameService


def get_game_repo() -> GameRepository:
    return GameRepository()


def get_report_repo() -> ReportRepository:
    return ReportRepository()


def get_trajectory_repo() -> TrajectoryRepository:
    return TrajectoryRepository()


def get_game_service(repo: GameRepository = Depends(get_game_repo)) -> GameService:
    return GameService(repo)


def get_simulation_service(
    repo: TrajectoryRepository = Depends(get_trajectory_repo),
) -> SimulationService:
    return SimulationService(repo)


def get_equilibrium_service(
    repo: ReportRepository = Depends(get_report_repo),
) -> EquilibriumService:
    return EquilibriumService(repo)
