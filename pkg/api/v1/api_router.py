from fastapi import APIRouter

from api.v1.dynamics_router import dynamics_router
from api.v1.equilibrium_router import equilibrium_router
from api.v1.games_router import games_router
from api.v1.properties_router import properties_router
from api.v1.softmax_router import softmax_router

api_router = APIRouter()
api_router.include_router(softmax_router)
api_router.include_router(games_router)
api_router.include_router(dynamics_router)
api_router.include_router(equilibrium_router)
api_router.include_router(properties_router)
