from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Verb(str, Enum):
    TRAIN = "Train"
    BUILD = "Build"
    ATTACK = "Attack"
    RETREAT = "Retreat"
    SCOUT = "Scout"
    NOOP = "NoOp"


class ArgKind(str, Enum):
    UNIT = "unit"
    STRUCTURE = "structure"
    REGION = "region"
    NONE = "none"


# verb -> expected argument kind
ACTION_SCHEMA: Dict[Verb, ArgKind] = {
    Verb.TRAIN: ArgKind.UNIT,
    Verb.BUILD: ArgKind.STRUCTURE,
    Verb.ATTACK: ArgKind.REGION,
    Verb.RETREAT: ArgKind.NONE,
    Verb.SCOUT: ArgKind.REGION,
    Verb.NOOP: ArgKind.NONE,
}

_VERBS_BY_LOWER = {verb.value.lower(): verb for verb in Verb}


def normalize_verb(raw: str) -> Optional[Verb]:
    """Case-insensitive verb lookup; None for anything outside the closed set."""
    return _VERBS_BY_LOWER.get(raw.strip().lower())


class ActionCommand(BaseModel):
    """One order, either a parsed candidate or a validated command (a_t)."""

    model_config = ConfigDict(frozen=True)

    verb: str = Field(..., description="Canonical verb, or the raw token if unknown")
    argument: Optional[str] = Field(None, description="Unit, structure or region id")

    def render(self) -> str:
        return f"{self.verb}({self.argument or ''})"


class Verdict(str, Enum):
    VALID = "valid"
    UNKNOWN_VERB = "unknown_verb"
    UNKNOWN_ARGUMENT = "unknown_argument"
    UNAFFORDABLE = "unaffordable"
    PREREQUISITE_MISSING = "prerequisite_missing"
    ILLEGAL_TARGET = "illegal_target"


class ActionVerdict(BaseModel):
    action: str = Field(..., description="Rendered candidate, or the raw line if unparseable")
    verdict: Verdict


class ValidityReport(BaseModel):
    """Per-candidate verdicts; every parsed action gets exactly one."""

    verdicts: List[ActionVerdict] = Field(default_factory=list)

    @property
    def accepted(self) -> int:
        return sum(1 for v in self.verdicts if v.verdict is Verdict.VALID)

    @property
    def rejected(self) -> int:
        return len(self.verdicts) - self.accepted

    def summary(self) -> Dict[str, int]:
        return {"accepted": self.accepted, "rejected": self.rejected}
