from dataclasses import dataclass, field
from typing import List, Set

from app.models.actions import ACTION_SCHEMA, ActionCommand, ArgKind, Verb, Verdict, normalize_verb
from app.models.catalog import REGIONS, Catalog
from app.models.world import Observation, PlayerState


@dataclass
class OrderBudget:
    """What one side can still spend and command within a batch of orders."""

    minerals: int
    gas: int
    own_home: str
    army_count: int
    workers: int = 0
    structures: Set[str] = field(default_factory=set)
    queued: List[str] = field(default_factory=list)

    @classmethod
    def from_observation(cls, observation: Observation) -> "OrderBudget":
        return cls(
            minerals=observation.minerals,
            gas=observation.gas,
            own_home=observation.own_home,
            army_count=observation.own_army_count,
            workers=observation.workers,
            structures=set(observation.structures),
            queued=[item for item, _ in observation.production_queue],
        )

    @classmethod
    def from_player(cls, state: PlayerState) -> "OrderBudget":
        return cls(
            minerals=state.minerals,
            gas=state.gas,
            own_home=state.home,
            army_count=len(state.army),
            workers=state.worker_count,
            structures=set(state.structure_names()),
            queued=[entry.item for entry in state.production_queue],
        )


def judge(action: ActionCommand, catalog: Catalog, budget: OrderBudget) -> Verdict:
    """
    Decide one order against the schema table and the remaining budget.

    A valid Train/Build reserves its cost in `budget`, so later orders of the
    same batch see what is left. Worker orders past the catalog's worker cap
    are unaffordable.
    """
    verb = normalize_verb(action.verb)
    if verb is None or verb.value != action.verb:
        return Verdict.UNKNOWN_VERB

    kind = ACTION_SCHEMA[verb]
    argument = action.argument
    if kind is ArgKind.NONE:
        return Verdict.VALID if argument is None else Verdict.UNKNOWN_ARGUMENT
    if argument is None:
        return Verdict.UNKNOWN_ARGUMENT

    if kind is ArgKind.UNIT:
        unit = catalog.unit(argument)
        if unit is None:
            return Verdict.UNKNOWN_ARGUMENT
        if unit.prerequisite and unit.prerequisite not in budget.structures:
            return Verdict.PREREQUISITE_MISSING
        if unit.is_worker:
            # completed plus queued workers count against the cap
            planned = budget.workers + budget.queued.count(unit.name)
            if planned >= catalog.economy.worker_cap:
                return Verdict.UNAFFORDABLE
        verdict = _reserve(budget, unit.mineral_cost, unit.gas_cost)
        if verdict is Verdict.VALID:
            budget.queued.append(unit.name)
        return verdict

    if kind is ArgKind.STRUCTURE:
        structure = catalog.structure(argument)
        if structure is None:
            return Verdict.UNKNOWN_ARGUMENT
        return _reserve(budget, structure.mineral_cost, structure.gas_cost)

    if argument not in REGIONS:
        return Verdict.UNKNOWN_ARGUMENT
    if argument == budget.own_home:
        return Verdict.ILLEGAL_TARGET
    if verb is Verb.ATTACK and budget.army_count == 0:
        return Verdict.ILLEGAL_TARGET
    return Verdict.VALID


def _reserve(budget: OrderBudget, minerals: int, gas: int) -> Verdict:
    if minerals > budget.minerals or gas > budget.gas:
        return Verdict.UNAFFORDABLE
    budget.minerals -= minerals
    budget.gas -= gas
    return Verdict.VALID
