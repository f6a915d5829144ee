from typing import Dict

from pydantic import BaseModel, ConfigDict, Field, field_validator


class StrategyRecord(BaseModel):
    """Named strategy variables stored at one decision timestep (s_t)."""

    model_config = ConfigDict(frozen=True)

    timestep: int = Field(..., ge=0)
    variables: Dict[str, str] = Field(
        default_factory=dict,
        description="Ordered name -> value map, e.g. Tactic -> aggressive",
    )

    @field_validator("variables")
    @classmethod
    def _values_are_tokens(cls, value: Dict[str, str]) -> Dict[str, str]:
        for name, token in value.items():
            if not token or "<" in token or ">" in token:
                raise ValueError(f"invalid value {token!r} for variable {name!r}")
        return value

    @property
    def tactic(self) -> str:
        return self.variables.get("Tactic", "")
