from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.agent import AgentMode
from app.models.backend import BackendDescriptor


class MatchOutcome(str, Enum):
    WIN = "win"
    LOSS = "loss"
    DRAW = "draw"


class MatchResult(BaseModel):
    """Outcome of one episode from the agent's (player A) point of view."""

    outcome: MatchOutcome
    final_tick: int = Field(..., ge=0)
    seed: int
    difficulty: int = Field(..., ge=1, le=7)
    mode: AgentMode
    production: Dict[str, int] = Field(
        default_factory=dict,
        description="Completed items of the agent by type, whole episode",
    )
    opponent_production: Dict[str, int] = Field(default_factory=dict)
    early_production: Dict[str, int] = Field(
        default_factory=dict,
        description="Completed items of the agent up to cutoff_tick",
    )
    cutoff_tick: int = Field(..., gt=0)


class ProductionMetrics(BaseModel):
    mean_advanced: float = Field(..., ge=0)
    mean_total: float = Field(..., ge=0)
    advanced_ratio: float = Field(..., ge=0, le=100, description="Percent")
    shares: Dict[str, float] = Field(default_factory=dict, description="Percent per unit type")
    empty: bool = Field(False, description="True when nothing was produced")


class EvalRow(BaseModel):
    mode: AgentMode
    difficulty: int
    episodes: int
    wins: int
    draws: int
    losses: int
    win_rate: float
    production: ProductionMetrics


class EvalReport(BaseModel):
    rows: List[EvalRow] = Field(default_factory=list)
    unit_types: List[str] = Field(default_factory=list, description="Share column order")


class EvalConfig(BaseModel):
    modes: List[AgentMode] = Field(default_factory=lambda: [AgentMode.MASMP, AgentMode.BASELINE])
    difficulties: List[int] = Field(default_factory=lambda: list(range(1, 8)))
    episodes: int = Field(5, gt=0, description="Episodes per (mode, difficulty) cell")
    base_seed: int = 0
    tick_limit: int = Field(2000, gt=0)
    decision_period: int = Field(8, ge=1)
    retry_budget: int = Field(2, ge=0)
    backend: BackendDescriptor
    spec_path: str
    catalog_path: Optional[str] = None
    out_dir: Optional[str] = None
    workers: int = Field(1, ge=1)
