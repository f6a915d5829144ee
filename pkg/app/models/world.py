from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

PLAYERS = ("A", "B")


def home_of(player: str) -> str:
    return f"home_{player}"


def opponent_of(player: str) -> str:
    return "B" if player == "A" else "A"


class Outcome(str, Enum):
    ONGOING = "ongoing"
    WIN_A = "win_a"
    WIN_B = "win_b"
    DRAW = "draw"


@dataclass
class ArmyUnit:
    unit_type: str
    hp: int


@dataclass
class Structure:
    name: str
    hp: int


@dataclass
class QueueEntry:
    item: str
    remaining: int


@dataclass
class CombatRecord:
    tick: int
    own_losses: int
    enemy_losses: int


@dataclass
class PlayerState:
    """Ground truth for one side. Mutated only inside step_world on a private copy."""

    player: str
    minerals: int
    gas: int
    worker_count: int
    income_multiplier_permille: int = 1000
    mineral_carry: int = 0
    gas_carry: int = 0
    structures: List[Structure] = field(default_factory=list)
    production_queue: List[QueueEntry] = field(default_factory=list)
    army: List[ArmyUnit] = field(default_factory=list)
    army_location: str = ""
    army_target: Optional[str] = None
    scout_region: Optional[str] = None
    scout_until: int = 0
    arrivals: List[Tuple[int, str]] = field(default_factory=list)
    last_combat: Optional[CombatRecord] = None
    produced: Dict[str, int] = field(default_factory=dict)

    @property
    def home(self) -> str:
        return home_of(self.player)

    def structure_names(self) -> List[str]:
        return [s.name for s in self.structures]

    def copy(self) -> "PlayerState":
        return PlayerState(
            player=self.player,
            minerals=self.minerals,
            gas=self.gas,
            worker_count=self.worker_count,
            income_multiplier_permille=self.income_multiplier_permille,
            mineral_carry=self.mineral_carry,
            gas_carry=self.gas_carry,
            structures=[Structure(s.name, s.hp) for s in self.structures],
            production_queue=[QueueEntry(q.item, q.remaining) for q in self.production_queue],
            army=[ArmyUnit(u.unit_type, u.hp) for u in self.army],
            army_location=self.army_location,
            army_target=self.army_target,
            scout_region=self.scout_region,
            scout_until=self.scout_until,
            arrivals=list(self.arrivals),
            last_combat=(
                CombatRecord(
                    self.last_combat.tick,
                    self.last_combat.own_losses,
                    self.last_combat.enemy_losses,
                )
                if self.last_combat
                else None
            ),
            produced=dict(self.produced),
        )


@dataclass
class WorldState:
    tick: int
    players: Dict[str, PlayerState]
    rng_seed: int
    tick_limit: int = 2000

    def player(self, name: str) -> PlayerState:
        return self.players[name]

    def copy(self) -> "WorldState":
        return WorldState(
            tick=self.tick,
            players={name: state.copy() for name, state in self.players.items()},
            rng_seed=self.rng_seed,
            tick_limit=self.tick_limit,
        )


class CombatSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    tick: int = Field(..., ge=0)
    own_losses: int = Field(..., ge=0)
    enemy_losses: int = Field(..., ge=0)


class Observation(BaseModel):
    """Fog-of-war filtered view of one player at one tick (o_t)."""

    model_config = ConfigDict(frozen=True)

    tick: int = Field(..., ge=0)
    player: str = Field(..., description="Observing side, A or B")
    own_home: str
    enemy_home: str
    minerals: int = Field(..., ge=0)
    gas: int = Field(..., ge=0)
    workers: int = Field(..., ge=0)
    structures: Dict[str, int] = Field(default_factory=dict)
    production_queue: List[Tuple[str, int]] = Field(
        default_factory=list,
        description="(item, remaining ticks) in queue order",
    )
    army: Dict[str, int] = Field(default_factory=dict)
    army_location: str
    own_army_supply: int = Field(0, ge=0)
    own_army_count: int = Field(0, ge=0)
    own_advanced_count: int = Field(0, ge=0)
    tech_structures: int = Field(0, ge=0, description="Own structures that unlock units")
    tech_pending: int = Field(0, ge=0, description="Queued structures that unlock units")
    scouted_region: Optional[str] = None
    visible_enemy_region: Optional[str] = None
    visible_enemy_army: Dict[str, int] = Field(default_factory=dict)
    visible_enemy_army_supply: int = Field(0, ge=0)
    enemy_reinforcements: int = Field(0, ge=0)
    visible_enemy_structures: Dict[str, int] = Field(default_factory=dict)
    last_combat: Optional[CombatSummary] = None


class OpponentScript(BaseModel):
    """Scripted built-in opponent for one difficulty level."""

    model_config = ConfigDict(frozen=True)

    difficulty: int = Field(..., ge=1, le=7)
    income_multiplier_permille: int = Field(..., gt=0)
    first_attack_tick: int = Field(..., gt=0)
    attack_period: int = Field(..., gt=0)
    unit_mix: Dict[str, int] = Field(
        ...,
        description="Unit type -> weight in 1/1000; weights sum to 1000",
    )
