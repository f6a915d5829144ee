"""
Deterministic macro-level RTS simulator: three regions, income, parallel
production, army movement, simultaneous combat and fog of war.

A WorldState is never mutated in place by step_world; every step works on a
copy so callers can keep earlier states for replay and hashing.
"""

import dataclasses
import hashlib
import json
import logging
from collections import Counter
from typing import Any, Dict, Iterable, List, Optional, Sequence

from app.models.actions import ActionCommand, Verb, Verdict
from app.models.catalog import REGIONS, Catalog
from app.models.world import (
    PLAYERS,
    ArmyUnit,
    CombatRecord,
    CombatSummary,
    Observation,
    Outcome,
    PlayerState,
    QueueEntry,
    Structure,
    WorldState,
    home_of,
    opponent_of,
)
from app.services.action_rules import OrderBudget, judge

logger = logging.getLogger(__name__)


class ContractViolationError(RuntimeError):
    """An order reached the simulator without passing validation."""


def initial_world(
    catalog: Catalog,
    seed: int,
    tick_limit: int = 2000,
    income_multiplier_permille: Optional[Dict[str, int]] = None,
) -> WorldState:
    """Symmetric starting state for both sides."""
    multipliers = income_multiplier_permille or {}
    economy = catalog.economy
    players = {}
    for player in PLAYERS:
        players[player] = PlayerState(
            player=player,
            minerals=economy.start_minerals,
            gas=economy.start_gas,
            worker_count=economy.start_workers,
            income_multiplier_permille=multipliers.get(player, 1000),
            structures=[
                Structure(name, catalog.structure(name).hp) for name in economy.start_structures
            ],
            army_location=home_of(player),
        )
    return WorldState(tick=0, players=players, rng_seed=seed, tick_limit=tick_limit)


def terminal_check(world: WorldState) -> Outcome:
    a_alive = bool(world.players["A"].structures)
    b_alive = bool(world.players["B"].structures)
    if not a_alive and not b_alive:
        return Outcome.DRAW
    if not b_alive:
        return Outcome.WIN_A
    if not a_alive:
        return Outcome.WIN_B
    if world.tick >= world.tick_limit:
        return Outcome.DRAW
    return Outcome.ONGOING


def step_world(
    world: WorldState,
    actions_a: Sequence[ActionCommand],
    actions_b: Sequence[ActionCommand],
    catalog: Catalog,
) -> WorldState:
    """
    Advance the world by one tick and return the new state.

    Order of resolution: orders (A, then B) -> income -> production queues ->
    movement -> combat/siege -> tick+1. Two armies that would swap regions
    fight where they stand instead of moving. Raises ContractViolationError if the
    world is already terminal or an order is not legal in the current state.
    """
    if terminal_check(world) is not Outcome.ONGOING:
        raise ContractViolationError(f"world is terminal at tick {world.tick}")

    new = world.copy()
    tick = new.tick
    for player, actions in (("A", actions_a), ("B", actions_b)):
        state = new.players[player]
        budget = OrderBudget.from_player(state)
        for action in actions:
            if not isinstance(action, ActionCommand):
                raise ContractViolationError(f"not an ActionCommand: {action!r}")
            verdict = judge(action, catalog, budget)
            if verdict is not Verdict.VALID:
                raise ContractViolationError(
                    f"unvalidated order {action.render()} for player {player}: {verdict.value}"
                )
            _apply_order(state, action, catalog, tick)

    for state in new.players.values():
        _apply_income(state, catalog)
        _advance_queue(state, catalog, tick)

    # armies heading through each other meet on the way and both stay put
    encounter = _armies_cross(new)
    if not encounter:
        for state in new.players.values():
            _move(state)

    _resolve_combat(new, catalog, encounter)

    window = catalog.economy.reinforcement_window
    for state in new.players.values():
        state.arrivals = [(t, unit) for t, unit in state.arrivals if t >= tick + 1 - window]

    new.tick = tick + 1
    return new


def _apply_order(state: PlayerState, action: ActionCommand, catalog: Catalog, tick: int) -> None:
    verb = Verb(action.verb)
    if verb is Verb.TRAIN:
        unit = catalog.unit(action.argument)
        state.minerals -= unit.mineral_cost
        state.gas -= unit.gas_cost
        state.production_queue.append(QueueEntry(unit.name, unit.build_ticks))
    elif verb is Verb.BUILD:
        structure = catalog.structure(action.argument)
        state.minerals -= structure.mineral_cost
        state.gas -= structure.gas_cost
        state.production_queue.append(QueueEntry(structure.name, structure.build_ticks))
    elif verb is Verb.ATTACK:
        state.army_target = action.argument
    elif verb is Verb.RETREAT:
        state.army_target = state.home
    elif verb is Verb.SCOUT:
        state.scout_region = action.argument
        state.scout_until = tick + catalog.economy.scout_ticks


def _apply_income(state: PlayerState, catalog: Catalog) -> None:
    economy = catalog.economy
    mult = state.income_multiplier_permille

    minerals = state.worker_count * economy.mineral_rate * mult + state.mineral_carry
    state.minerals += minerals // 1000
    state.mineral_carry = minerals % 1000

    gas = state.worker_count * economy.gas_rate_permille * mult + state.gas_carry
    state.gas += gas // 1_000_000
    state.gas_carry = gas % 1_000_000


def _advance_queue(state: PlayerState, catalog: Catalog, tick: int) -> None:
    pending: List[QueueEntry] = []
    for entry in state.production_queue:
        entry.remaining -= 1
        if entry.remaining > 0:
            pending.append(entry)
            continue
        state.produced[entry.item] = state.produced.get(entry.item, 0) + 1
        unit = catalog.unit(entry.item)
        if unit is None:
            state.structures.append(Structure(entry.item, catalog.structure(entry.item).hp))
        elif unit.is_worker:
            state.worker_count += 1
        else:
            if not state.army:
                state.army_location = state.home
            state.army.append(ArmyUnit(unit.name, unit.hp))
            state.arrivals.append((tick, unit.name))
    state.production_queue = pending


def _next_region(state: PlayerState) -> Optional[str]:
    """Region the army enters this tick, None if it holds."""
    if not state.army or state.army_target is None:
        return None
    here = REGIONS.index(state.army_location)
    there = REGIONS.index(state.army_target)
    if here == there:
        return None
    return REGIONS[here + (1 if there > here else -1)]


def _armies_cross(world: WorldState) -> bool:
    a = world.players["A"]
    b = world.players["B"]
    return _next_region(a) == b.army_location and _next_region(b) == a.army_location


def _move(state: PlayerState) -> None:
    if not state.army:
        state.army_location = state.home
        state.army_target = None
        return
    step = _next_region(state)
    if step is None:
        state.army_target = None
    else:
        state.army_location = step


def _resolve_combat(world: WorldState, catalog: Catalog, encounter: bool = False) -> None:
    """
    Armies sharing a region, or crossing on the road between two (`encounter`),
    fight; otherwise an army alone in the enemy home sieges its structures.
    """
    a = world.players["A"]
    b = world.players["B"]
    if a.army and b.army and (encounter or a.army_location == b.army_location):
        damage_by_a = _army_attack(a, catalog)
        damage_by_b = _army_attack(b, catalog)
        losses_b = _apply_damage(b.army, damage_by_a)
        losses_a = _apply_damage(a.army, damage_by_b)
        a.last_combat = CombatRecord(world.tick, losses_a, losses_b)
        b.last_combat = CombatRecord(world.tick, losses_b, losses_a)
        logger.debug(
            "tick %d combat at %s/%s: A lost %d, B lost %d",
            world.tick, a.army_location, b.army_location, losses_a, losses_b,
        )
    else:
        for attacker, defender in ((a, b), (b, a)):
            if attacker.army and attacker.army_location == defender.home:
                _apply_damage(defender.structures, _army_attack(attacker, catalog))

    for state in (a, b):
        if not state.army:
            state.army_location = state.home
            state.army_target = None


def _army_attack(state: PlayerState, catalog: Catalog) -> int:
    return sum(catalog.unit(u.unit_type).attack for u in state.army)


def _apply_damage(targets: List[Any], damage: int) -> int:
    """Lowest-hp-first damage with overflow; returns the number destroyed."""
    order = sorted(range(len(targets)), key=lambda i: (targets[i].hp, i))
    destroyed = set()
    remaining = damage
    for index in order:
        if remaining <= 0:
            break
        target = targets[index]
        if remaining >= target.hp:
            remaining -= target.hp
            destroyed.add(index)
        else:
            target.hp -= remaining
            remaining = 0
    targets[:] = [t for i, t in enumerate(targets) if i not in destroyed]
    return len(destroyed)


def observe(world: WorldState, player: str, catalog: Catalog) -> Observation:
    """Build the fog-of-war filtered observation of `player`."""
    me = world.players[player]
    enemy = world.players[opponent_of(player)]

    visible = {me.home}
    if me.army:
        visible.add(me.army_location)
    scouted = me.scout_region if me.scout_region and world.tick < me.scout_until else None
    if scouted:
        visible.add(scouted)

    enemy_visible = bool(enemy.army) and enemy.army_location in visible
    enemy_army = _counts(u.unit_type for u in enemy.army) if enemy_visible else {}
    reinforcements = 0
    if enemy_visible:
        since = world.tick - catalog.economy.reinforcement_window
        reinforcements = sum(1 for t, _ in enemy.arrivals if t >= since)

    tech = set(catalog.tech_structures)
    last_combat = None
    if me.last_combat is not None:
        last_combat = CombatSummary(
            tick=me.last_combat.tick,
            own_losses=me.last_combat.own_losses,
            enemy_losses=me.last_combat.enemy_losses,
        )

    return Observation(
        tick=world.tick,
        player=player,
        own_home=me.home,
        enemy_home=enemy.home,
        minerals=me.minerals,
        gas=me.gas,
        workers=me.worker_count,
        structures=_counts(me.structure_names()),
        production_queue=[(q.item, q.remaining) for q in me.production_queue],
        army=_counts(u.unit_type for u in me.army),
        army_location=me.army_location,
        own_army_supply=_supply(catalog, (u.unit_type for u in me.army)),
        own_army_count=len(me.army),
        own_advanced_count=sum(1 for u in me.army if catalog.is_advanced(u.unit_type)),
        tech_structures=sum(1 for name in me.structure_names() if name in tech),
        tech_pending=sum(1 for q in me.production_queue if q.item in tech),
        scouted_region=scouted,
        visible_enemy_region=enemy.army_location if enemy_visible else None,
        visible_enemy_army=enemy_army,
        visible_enemy_army_supply=_supply(catalog, (u.unit_type for u in enemy.army))
        if enemy_visible
        else 0,
        enemy_reinforcements=reinforcements,
        visible_enemy_structures=_counts(enemy.structure_names()) if enemy.home in visible else {},
        last_combat=last_combat,
    )


def _counts(names: Iterable[str]) -> Dict[str, int]:
    return dict(sorted(Counter(names).items()))


def _supply(catalog: Catalog, unit_types: Iterable[str]) -> int:
    return sum(catalog.unit(name).supply for name in unit_types)


def tick_trace_records(
    before: WorldState,
    after: WorldState,
    actions: Dict[str, Sequence[ActionCommand]],
) -> List[Dict[str, Any]]:
    """Per-player trace lines for one simulated tick."""
    records = []
    for player in PLAYERS:
        state = after.players[player]
        combat = None
        if state.last_combat is not None and state.last_combat.tick == before.tick:
            combat = {
                "own_losses": state.last_combat.own_losses,
                "enemy_losses": state.last_combat.enemy_losses,
            }
        records.append(
            {
                "tick": before.tick,
                "acting_player": player,
                "actions": [a.render() for a in actions.get(player, ())],
                "combat_summary": combat,
                "resources": {"minerals": state.minerals, "gas": state.gas},
            }
        )
    return records


def world_digest(world: WorldState) -> str:
    """Stable sha256 over the full ground truth, used for replay checks."""
    payload = json.dumps(dataclasses.asdict(world), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
