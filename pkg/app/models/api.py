from typing import List, Optional

from pydantic import BaseModel, Field

from app.models.agent import AgentMode
from app.models.backend import BackendKind, HealthStatus
from app.models.evaluation import MatchResult
from app.models.memory import StrategyRecord
from app.models.world import Observation


class HealthResponse(BaseModel):
    status: str = Field("ok", description="Always ok while the service is up")


class SpecCheckRequest(BaseModel):
    text: str = Field(..., description="Spec DSL document")


class SpecSummary(BaseModel):
    states: List[str]
    initial_state: str
    transitions: int = Field(..., ge=0)
    rules: int = Field(..., ge=0)
    variables: List[str]


class SpecErrorDetail(BaseModel):
    message: str
    line: int
    column: int


class BackendHealth(BaseModel):
    kind: BackendKind
    status: HealthStatus


class EpisodeRequest(BaseModel):
    mode: AgentMode = AgentMode.MASMP
    difficulty: int = Field(1, ge=1, le=7)
    seed: int = 0
    tick_limit: Optional[int] = Field(None, gt=0, description="Defaults to MASMP_TICK_LIMIT")


class EpisodeResponse(BaseModel):
    result: MatchResult
    states: List[Optional[str]] = Field(
        default_factory=list,
        description="Tactic after each decision step",
    )
    transitions: List[str] = Field(default_factory=list, description="Replay report lines")


class PromptRequest(BaseModel):
    observation: Observation
    last: Optional[StrategyRecord] = None
    baseline: bool = False


class PromptResponse(BaseModel):
    prompt: str
    sha256: str
