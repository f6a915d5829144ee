from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.actions import ValidityReport
from app.models.backend import AttemptRecord, BackendDescriptor
from app.models.machine import MachineSpec


class AgentMode(str, Enum):
    MASMP = "masmp"
    BASELINE = "baseline"


class AgentConfig(BaseModel):
    """Everything one decision loop needs besides the world."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: AgentMode
    spec: Optional[MachineSpec] = Field(None, description="Required in masmp mode")
    backend: BackendDescriptor
    decision_period: int = Field(8, ge=1, description="Ticks between decisions")
    retry_budget: int = Field(2, ge=0, description="Extra attempts after a transport failure")
    max_tokens: int = Field(512, gt=0)
    temperature: float = Field(0.0, ge=0.0)

    @model_validator(mode="after")
    def _masmp_needs_spec(self) -> "AgentConfig":
        if self.mode is AgentMode.MASMP and self.spec is None:
            raise ValueError("masmp mode requires a spec")
        return self


class DecisionStepTrace(BaseModel):
    """One line of the episode decision trace."""

    timestep: int = Field(..., ge=0)
    mode: AgentMode
    prompt_sha256: str
    raw_output: Optional[str] = None
    attempts: List[AttemptRecord] = Field(default_factory=list)
    failure: Optional[str] = Field(None, description="Set when the step degraded to a hold")
    extracted_strategies: List[Dict[str, str]] = Field(default_factory=list)
    validity_report: ValidityReport = Field(default_factory=ValidityReport)
    executed_actions: List[str] = Field(default_factory=list)
    memory_latest_after: Optional[Dict[str, str]] = None
    state: Optional[str] = Field(
        None,
        description="Tactic in force after this step (memory in masmp, extraction in baseline)",
    )
    flags: List[str] = Field(default_factory=list)
