from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

REGIONS = ("home_A", "center", "home_B")


class Tier(str, Enum):
    BASIC = "basic"
    ADVANCED = "advanced"


class StructureRole(str, Enum):
    BASE = "base"
    TECH = "tech"


class UnitTypeDef(BaseModel):
    """A trainable unit type (workers included)."""

    name: str = Field(..., min_length=1, description="Unit token, e.g. zealot")
    mineral_cost: int = Field(..., ge=0)
    gas_cost: int = Field(0, ge=0)
    build_ticks: int = Field(..., gt=0)
    tier: Tier = Field(..., description="basic or advanced (advanced needs a prerequisite)")
    attack: int = Field(0, ge=0, description="Damage dealt per tick of combat")
    hp: int = Field(..., gt=0)
    supply: int = Field(1, ge=0)
    prerequisite: Optional[str] = Field(
        None,
        description="Structure that must exist at enqueue time",
    )
    is_worker: bool = False

    @model_validator(mode="after")
    def _tier_matches_prerequisite(self) -> "UnitTypeDef":
        if self.tier is Tier.ADVANCED and not self.prerequisite:
            raise ValueError(f"advanced unit {self.name!r} needs a prerequisite")
        if self.tier is Tier.BASIC and self.prerequisite:
            raise ValueError(f"basic unit {self.name!r} must not have a prerequisite")
        return self


class StructureDef(BaseModel):
    name: str = Field(..., min_length=1)
    role: StructureRole
    mineral_cost: int = Field(..., ge=0)
    gas_cost: int = Field(0, ge=0)
    build_ticks: int = Field(..., gt=0)
    hp: int = Field(..., gt=0)


class EconomyDef(BaseModel):
    mineral_rate: int = Field(1, ge=0, description="Minerals per worker per tick")
    gas_rate_permille: int = Field(250, ge=0, description="Gas per worker per tick, in 1/1000")
    start_minerals: int = Field(50, ge=0)
    start_gas: int = Field(0, ge=0)
    start_workers: int = Field(12, ge=0)
    start_structures: List[str] = Field(default_factory=lambda: ["nexus"])
    worker_cap: int = Field(22, ge=0)
    scout_ticks: int = Field(8, gt=0)
    reinforcement_window: int = Field(8, gt=0)
    production_cutoff_tick: int = Field(
        420,
        gt=0,
        description="Tick analog of the 7-minute mark used for production metrics",
    )


class OpponentAnchor(BaseModel):
    income_multiplier_permille: int = Field(..., gt=0)
    first_attack_tick: int = Field(..., gt=0)
    attack_period: int = Field(..., gt=0)
    advanced_fraction_permille: int = Field(..., ge=0, le=1000)


class Catalog(BaseModel):
    """Unit catalog, economy constants and opponent anchors (versioned asset)."""

    version: int = Field(..., ge=1)
    economy: EconomyDef = Field(default_factory=EconomyDef)
    units: List[UnitTypeDef]
    structures: List[StructureDef]
    opponent_anchors: Dict[str, OpponentAnchor]

    @model_validator(mode="after")
    def _check_references(self) -> "Catalog":
        structure_names = {s.name for s in self.structures}
        unit_names = [u.name for u in self.units]
        if len(set(unit_names)) != len(unit_names):
            raise ValueError("duplicate unit names in catalog")
        if structure_names & set(unit_names):
            raise ValueError("unit and structure names must be disjoint")
        for unit in self.units:
            if unit.prerequisite and unit.prerequisite not in structure_names:
                raise ValueError(
                    f"unit {unit.name!r} requires unknown structure {unit.prerequisite!r}"
                )
            if not unit.is_worker and unit.mineral_cost + unit.gas_cost == 0:
                raise ValueError(f"army unit {unit.name!r} must have a cost")
        if sum(1 for u in self.units if u.is_worker) != 1:
            raise ValueError("catalog needs exactly one worker type")
        for name in self.economy.start_structures:
            if name not in structure_names:
                raise ValueError(f"unknown start structure {name!r}")
        for level in ("level_1", "level_7"):
            if level not in self.opponent_anchors:
                raise ValueError(f"missing opponent anchor {level!r}")
        return self

    def unit(self, name: str) -> Optional[UnitTypeDef]:
        for unit in self.units:
            if unit.name == name:
                return unit
        return None

    def structure(self, name: str) -> Optional[StructureDef]:
        for structure in self.structures:
            if structure.name == name:
                return structure
        return None

    @property
    def worker(self) -> UnitTypeDef:
        return next(u for u in self.units if u.is_worker)

    @property
    def army_units(self) -> List[UnitTypeDef]:
        return [u for u in self.units if not u.is_worker]

    @property
    def tech_structures(self) -> List[str]:
        """Structures that unlock at least one unit type, in catalog order."""
        needed = {u.prerequisite for u in self.units if u.prerequisite}
        return [s.name for s in self.structures if s.name in needed]

    def is_advanced(self, unit_name: str) -> bool:
        unit = self.unit(unit_name)
        return unit is not None and unit.tier is Tier.ADVANCED
