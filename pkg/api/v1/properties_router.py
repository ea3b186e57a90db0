from fastapi import APIRouter, HTTPException, status

from models.models import SuiteReport, VerifyRequest
from services.property_service import run_suite

properties_router = APIRouter(prefix="/properties", tags=["properties"])


@properties_router.post(
    "/verify", response_model=SuiteReport, response_model_by_alias=True
)
def verify_properties(data: VerifyRequest):
    try:
        return run_suite(data.dimensions, data.lambdas, data.samples, data.seed)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
