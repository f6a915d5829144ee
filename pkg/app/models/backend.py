from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator

from app.models.memory import StrategyRecord
from app.models.world import Observation


class BackendKind(str, Enum):
    REMOTE = "remote"
    SCRIPTED = "scripted"
    ORACLE = "oracle"


class HealthStatus(str, Enum):
    OK = "ok"
    UNREACHABLE = "unreachable"
    UNAUTHORIZED = "unauthorized"


class BackendDescriptor(BaseModel):
    """How to reach a text-generation backend."""

    kind: BackendKind
    endpoint: Optional[str] = Field(
        None,
        description="Base URL of a chat-completion endpoint, e.g. http://localhost:8000/v1",
    )
    model_name: Optional[str] = None
    auth_env: Optional[str] = Field(
        None,
        description="Name of the environment variable that holds the bearer token",
    )
    timeout_seconds: float = Field(30.0, gt=0)
    transcript_path: Optional[str] = Field(None, description="JSON Lines transcript (scripted)")
    spec_path: Optional[str] = Field(None, description="Spec DSL file (oracle)")

    @model_validator(mode="after")
    def _required_per_kind(self) -> "BackendDescriptor":
        if self.kind is BackendKind.REMOTE and not (self.endpoint and self.model_name):
            raise ValueError("remote backend requires endpoint and model_name")
        if self.kind is BackendKind.SCRIPTED and not self.transcript_path:
            raise ValueError("scripted backend requires transcript_path")
        if self.kind is BackendKind.ORACLE and not self.spec_path:
            raise ValueError("oracle backend requires spec_path")
        return self


class DecisionContext(BaseModel):
    """Structured side channel next to the prompt; only the oracle reads it."""

    observation: Observation
    last: Optional[StrategyRecord] = None


class GenerationRequest(BaseModel):
    prompt: str = Field(..., min_length=1)
    max_tokens: int = Field(512, gt=0)
    temperature: float = Field(0.0, ge=0.0)
    seed: Optional[int] = None
    context: Optional[DecisionContext] = None


class AttemptRecord(BaseModel):
    attempt: int = Field(..., ge=1)
    ok: bool
    error: Optional[str] = None

