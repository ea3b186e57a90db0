from fastapi import APIRouter, HTTPException, status

from core.exceptions import InvalidInputError
from core.operators import lse, softmax, softmax_jacobian
from models.models import SoftmaxRequest, SoftmaxResponse

softmax_router = APIRouter(prefix="/softmax", tags=["softmax"])


@softmax_router.post("", response_model=SoftmaxResponse)
def evaluate_softmax(data: SoftmaxRequest):
    try:
        return SoftmaxResponse(
            softmax=softmax(data.z, data.lam).tolist(),
            lse=lse(data.z, data.lam),
            jacobian=softmax_jacobian(data.z, data.lam).tolist(),
        )
    except InvalidInputError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
