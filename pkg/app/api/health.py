from fastapi import APIRouter

from app.models.api import HealthResponse

router = APIRouter()


@router.get("/", response_model=HealthResponse, summary="Healthcheck")
async def healthcheck() -> HealthResponse:
    return HealthResponse(status="ok")
