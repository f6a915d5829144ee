from fastapi import APIRouter, HTTPException

from app.config import get_settings
from app.models.api import BackendHealth
from app.services import backends

router = APIRouter()


@router.get("/health", response_model=BackendHealth, summary="Health-check the configured backend")
def backend_health() -> BackendHealth:
    settings = get_settings()
    try:
        backend = backends.build_backend(settings.backend_descriptor())
    except (RuntimeError, ValueError) as exc:
        raise HTTPException(status_code=503, detail=str(exc)) from exc
    try:
        status = backends.health_check(backend)
    finally:
        backends.close_backend(backend)
    return BackendHealth(kind=backend.kind, status=status)
