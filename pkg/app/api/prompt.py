from fastapi import APIRouter, HTTPException

from app.config import get_settings
from app.models.api import PromptRequest, PromptResponse
from app.services.catalog import get_catalog
from app.services.prompt_compiler import (
    compile_baseline_prompt,
    compile_prompt,
    prompt_sha256,
    render_observation,
)
from app.services.spec_parser import load_spec

router = APIRouter()


@router.post("/compile", response_model=PromptResponse, summary="Render the decision prompt")
async def compile_decision_prompt(body: PromptRequest) -> PromptResponse:
    obs_text = render_observation(body.observation)
    if body.baseline:
        prompt = compile_baseline_prompt(obs_text)
    else:
        settings = get_settings()
        try:
            spec = load_spec(settings.spec_path, get_catalog(settings.catalog_path))
        except (RuntimeError, ValueError) as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        prompt = compile_prompt(spec, obs_text, body.last)
    return PromptResponse(prompt=prompt, sha256=prompt_sha256(prompt))
