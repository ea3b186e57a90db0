from fastapi import FastAPI
from fastapi.responses import JSONResponse

from api.v1.api_router import api_router
from config.logger import setup_logging
from config.settings import settings

setup_logging()

app = FastAPI(title=settings.PROJECT_NAME)

app.include_router(api_router, prefix="/api/v1")


@app.get("/health", response_class=JSONResponse)
async def healthcheck():
    """
    Simple healthcheck.
    Returns 200 OK while the application is alive.
    """
    return {"status": "ok"}
