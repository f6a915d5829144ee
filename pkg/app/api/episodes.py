from fastapi import APIRouter, HTTPException

from app.config import get_settings
from app.models.agent import AgentConfig
from app.models.api import EpisodeRequest, EpisodeResponse
from app.services.catalog import get_catalog
from app.services.evaluation import replay_report
from app.services.opponent import build_opponent_script
from app.services.orchestrator import run_agent_episode
from app.services.spec_parser import load_spec

router = APIRouter()


@router.post("/run", response_model=EpisodeResponse, summary="Play one episode")
def run_episode(body: EpisodeRequest) -> EpisodeResponse:
    """
    Play one episode against the scripted opponent with the configured
    backend and spec. Configuration problems are reported as 503.
    """
    settings = get_settings()
    try:
        catalog = get_catalog(settings.catalog_path)
        cfg = AgentConfig(
            mode=body.mode,
            spec=load_spec(settings.spec_path, catalog),
            backend=settings.backend_descriptor(),
            decision_period=settings.decision_period,
            retry_budget=settings.retry_budget,
            max_tokens=settings.max_tokens,
            temperature=settings.temperature,
        )
        episode = run_agent_episode(
            cfg,
            body.seed,
            build_opponent_script(body.difficulty, catalog),
            body.tick_limit or settings.tick_limit,
            catalog,
        )
    except (RuntimeError, ValueError) as exc:
        raise HTTPException(status_code=503, detail=str(exc)) from exc
    return EpisodeResponse(
        result=episode.result,
        states=episode.states,
        transitions=replay_report(episode.traces),
    )
