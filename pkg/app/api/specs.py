from fastapi import APIRouter, HTTPException

from app.config import get_settings
from app.models.api import SpecCheckRequest, SpecErrorDetail, SpecSummary
from app.services.catalog import get_catalog
from app.services.spec_parser import SpecParseError, parse_spec

router = APIRouter()


@router.post("/check", response_model=SpecSummary, summary="Validate a spec document")
async def check_spec(body: SpecCheckRequest) -> SpecSummary:
    """
    Parse the document against the configured unit catalog.

    Parse errors come back as 422 with message, line and column; an
    unreadable catalog is a 503.
    """
    try:
        spec = parse_spec(body.text, get_catalog(get_settings().catalog_path))
    except SpecParseError as exc:
        detail = SpecErrorDetail(message=exc.message, line=exc.line, column=exc.column)
        raise HTTPException(status_code=422, detail=detail.model_dump()) from exc
    except RuntimeError as exc:
        raise HTTPException(status_code=503, detail=str(exc)) from exc
    return SpecSummary(
        states=list(spec.states),
        initial_state=spec.initial_state,
        transitions=len(spec.transitions),
        rules=len(spec.rules),
        variables=list(spec.variable_names),
    )
