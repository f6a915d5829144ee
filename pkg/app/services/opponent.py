import random
from typing import Dict, List, Protocol

from app.models.actions import ActionCommand, Verb
from app.models.catalog import Catalog, OpponentAnchor, Tier
from app.models.world import OpponentScript, WorldState, opponent_of


class Opponent(Protocol):
    """Anything that issues orders for one side of the simulator."""

    def actions(self, world: WorldState, player: str, catalog: Catalog) -> List[ActionCommand]:
        ...


def _interpolate(low: int, high: int, difficulty: int) -> int:
    # floor keeps the sequence monotone in either direction
    return low + (high - low) * (difficulty - 1) // 6


def build_opponent_script(difficulty: int, catalog: Catalog) -> OpponentScript:
    """
    Linear interpolation between the catalog's level-1 and level-7 anchors.

    The advanced share of the unit mix is split evenly over the advanced
    army types, the rest evenly over the basic army types.
    """
    if not 1 <= difficulty <= 7:
        raise ValueError(f"difficulty must be in 1..7, got {difficulty}")
    low: OpponentAnchor = catalog.opponent_anchors["level_1"]
    high: OpponentAnchor = catalog.opponent_anchors["level_7"]

    advanced_share = _interpolate(
        low.advanced_fraction_permille, high.advanced_fraction_permille, difficulty
    )
    basic = [u.name for u in catalog.army_units if u.tier is Tier.BASIC]
    advanced = [u.name for u in catalog.army_units if u.tier is Tier.ADVANCED]
    if not advanced:
        advanced_share = 0
    mix: Dict[str, int] = {}
    for names, share in ((basic, 1000 - advanced_share), (advanced, advanced_share)):
        for index, name in enumerate(names):
            # remainder goes to the first type so weights sum to exactly 1000
            mix[name] = share // len(names) + (share % len(names) if index == 0 else 0)

    return OpponentScript(
        difficulty=difficulty,
        income_multiplier_permille=_interpolate(
            low.income_multiplier_permille, high.income_multiplier_permille, difficulty
        ),
        first_attack_tick=_interpolate(low.first_attack_tick, high.first_attack_tick, difficulty),
        attack_period=_interpolate(low.attack_period, high.attack_period, difficulty),
        unit_mix=mix,
    )


def run_opponent(
    script: OpponentScript,
    world: WorldState,
    catalog: Catalog,
    player: str = "B",
) -> List[ActionCommand]:
    """
    Orders of the scripted opponent for the current tick.

    Deterministic in (script, world, seed): one worker per tick up to the
    worker cap, the tech structure when the mix needs it, then army units
    drawn from the mix while affordable, and an attack on the enemy base on
    the wave schedule.
    """
    state = world.players[player]
    rng = random.Random(f"{world.rng_seed}:{world.tick}:{script.difficulty}:{player}")
    minerals, gas = state.minerals, state.gas
    structures = set(state.structure_names())
    queued = [entry.item for entry in state.production_queue]
    actions: List[ActionCommand] = []

    worker = catalog.worker
    workers_planned = state.worker_count + queued.count(worker.name)
    if workers_planned < catalog.economy.worker_cap and minerals >= worker.mineral_cost:
        actions.append(ActionCommand(verb=Verb.TRAIN.value, argument=worker.name))
        minerals -= worker.mineral_cost

    weighted = {name: weight for name, weight in script.unit_mix.items() if weight > 0}
    for tech in catalog.tech_structures:
        needs_tech = any(catalog.unit(name).prerequisite == tech for name in weighted)
        if needs_tech and tech not in structures and tech not in queued:
            cost = catalog.structure(tech)
            if minerals >= cost.mineral_cost and gas >= cost.gas_cost:
                actions.append(ActionCommand(verb=Verb.BUILD.value, argument=tech))
                minerals -= cost.mineral_cost
                gas -= cost.gas_cost

    trainable = sorted(
        name
        for name in weighted
        if not catalog.unit(name).prerequisite or catalog.unit(name).prerequisite in structures
    )
    while trainable:
        choice = rng.choices(trainable, weights=[weighted[n] for n in trainable])[0]
        unit = catalog.unit(choice)
        if unit.mineral_cost > minerals or unit.gas_cost > gas:
            break
        actions.append(ActionCommand(verb=Verb.TRAIN.value, argument=choice))
        minerals -= unit.mineral_cost
        gas -= unit.gas_cost

    tick = world.tick
    on_schedule = (
        tick >= script.first_attack_tick
        and (tick - script.first_attack_tick) % script.attack_period == 0
    )
    if on_schedule and state.army:
        actions.append(
            ActionCommand(verb=Verb.ATTACK.value, argument=f"home_{opponent_of(player)}")
        )
    return actions


class ScriptedOpponent:
    """Adapter so OpponentScript fits the Opponent protocol."""

    def __init__(self, script: OpponentScript) -> None:
        self.script = script

    def actions(self, world: WorldState, player: str, catalog: Catalog) -> List[ActionCommand]:
        return run_opponent(self.script, world, catalog, player)


class PassiveOpponent:
    """Never issues orders; used for draws and scripted scenarios."""

    def actions(self, world: WorldState, player: str, catalog: Catalog) -> List[ActionCommand]:
        return []
