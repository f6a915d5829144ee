import pytest

from app.models.actions import ActionCommand
from app.models.world import ArmyUnit, OpponentScript, Outcome
from app.services import simulator
from app.services.opponent import run_opponent
from app.services.simulator import (
    ContractViolationError,
    initial_world,
    observe,
    step_world,
    terminal_check,
    tick_trace_records,
    world_digest,
)


def train(unit):
    return ActionCommand(verb="Train", argument=unit)


def _rush_script(difficulty=7):
    return OpponentScript(
        difficulty=difficulty,
        income_multiplier_permille=1000,
        first_attack_tick=40,
        attack_period=20,
        unit_mix={"zealot": 1000},
    )


def _play(catalog, seed, ticks, on_step=None):
    """Both sides driven by the early-attack script; returns the final world."""
    world = initial_world(catalog, seed, tick_limit=ticks)
    script = _rush_script()
    while terminal_check(world) is Outcome.ONGOING:
        actions_a = run_opponent(script, world, catalog, "A")
        actions_b = run_opponent(script, world, catalog, "B")
        before = world
        world = step_world(world, actions_a, actions_b, catalog)
        if on_step:
            on_step(before, world)
    return world


def test_initial_world_is_symmetric(catalog):
    world = initial_world(catalog, seed=3)
    a, b = world.players["A"], world.players["B"]
    assert world.tick == 0
    assert (a.minerals, a.gas, a.worker_count) == (50, 0, 12)
    assert (b.minerals, b.gas, b.worker_count) == (50, 0, 12)
    assert a.structure_names() == b.structure_names() == ["nexus"]
    assert a.army_location == "home_A"
    assert b.army_location == "home_B"


def test_income_per_tick(catalog):
    world = step_world(initial_world(catalog, seed=0), [], [], catalog)
    a = world.players["A"]
    # 12 workers: +12 minerals, 12 * 0.25 = 3 gas
    assert a.minerals == 62
    assert a.gas == 3
    assert world.tick == 1


def test_income_multiplier_is_exact_over_time(catalog):
    world = initial_world(catalog, seed=0, income_multiplier_permille={"B": 600})
    for _ in range(5):
        world = step_world(world, [], [], catalog)
    # 12 workers * 5 ticks * 0.6 = 36, no rounding drift
    assert world.players["B"].minerals == 50 + 36
    assert world.players["A"].minerals == 50 + 60


def test_train_deducts_at_enqueue_and_completes_after_build_ticks(catalog):
    world = step_world(initial_world(catalog, seed=0), [train("probe")], [], catalog)
    a = world.players["A"]
    assert a.minerals == 0 + 12
    assert a.production_queue[0].item == "probe"
    assert a.production_queue[0].remaining == 11

    for _ in range(10):
        world = step_world(world, [], [], catalog)
    assert world.players["A"].worker_count == 12

    world = step_world(world, [], [], catalog)
    assert world.tick == 12
    assert world.players["A"].worker_count == 13
    assert world.players["A"].produced == {"probe": 1}


def test_step_rejects_unvalidated_orders(catalog):
    world = initial_world(catalog, seed=0)
    world.players["A"].minerals = 1000
    world.players["A"].gas = 1000
    with pytest.raises(ContractViolationError):
        step_world(world, [train("stalker")], [], catalog)
    with pytest.raises(ContractViolationError):
        step_world(world, [], [ActionCommand(verb="Summon", argument="dragon")], catalog)
    with pytest.raises(ContractViolationError):
        step_world(world, [ActionCommand(verb="Attack", argument="home_B")], [], catalog)


def test_step_rejects_workers_over_the_cap(catalog):
    world = initial_world(catalog, seed=0)
    a = world.players["A"]
    a.minerals = 5000
    a.worker_count = catalog.economy.worker_cap - 1
    with pytest.raises(ContractViolationError):
        step_world(world, [train("probe"), train("probe")], [], catalog)

    world = step_world(world, [train("probe")], [], catalog)
    with pytest.raises(ContractViolationError):
        step_world(world, [train("probe")], [], catalog)


def test_step_does_not_mutate_input(catalog):
    world = initial_world(catalog, seed=0)
    digest = world_digest(world)
    step_world(world, [train("probe")], [], catalog)
    assert world_digest(world) == digest


def test_terminal_check(catalog):
    world = initial_world(catalog, seed=0, tick_limit=10)
    assert terminal_check(world) is Outcome.ONGOING

    world.players["B"].structures = []
    assert terminal_check(world) is Outcome.WIN_A

    world.players["A"].structures = []
    assert terminal_check(world) is Outcome.DRAW

    world = initial_world(catalog, seed=0, tick_limit=10)
    world.tick = 10
    assert terminal_check(world) is Outcome.DRAW
    with pytest.raises(ContractViolationError):
        step_world(world, [], [], catalog)


def test_combat_lowest_hp_first_with_simultaneous_damage(catalog):
    world = initial_world(catalog, seed=0)
    a, b = world.players["A"], world.players["B"]
    a.army = [ArmyUnit("zealot", 60) for _ in range(3)]
    a.army_location = "center"
    b.army = [ArmyUnit("zealot", 18), ArmyUnit("zealot", 18)]
    b.army_location = "center"

    world = step_world(world, [], [], catalog)
    a, b = world.players["A"], world.players["B"]
    # 3 x 6 damage kills exactly one 18 hp unit; 2 x 6 hits the first zealot
    assert len(b.army) == 1
    assert [u.hp for u in a.army] == [48, 60, 60]
    assert a.last_combat.own_losses == 0
    assert a.last_combat.enemy_losses == 1
    assert b.last_combat.own_losses == 1


def test_siege_damages_lowest_hp_structure(catalog):
    world = initial_world(catalog, seed=0)
    world.players["A"].army = [ArmyUnit("zealot", 60), ArmyUnit("zealot", 60)]
    world.players["A"].army_location = "home_B"

    world = step_world(world, [], [], catalog)
    assert [s.hp for s in world.players["B"].structures] == [988]


def test_army_moves_one_hop_per_tick(catalog):
    world = initial_world(catalog, seed=0)
    world.players["A"].army = [ArmyUnit("zealot", 60)]

    world = step_world(world, [ActionCommand(verb="Attack", argument="home_B")], [], catalog)
    assert world.players["A"].army_location == "center"
    world = step_world(world, [], [], catalog)
    assert world.players["A"].army_location == "home_B"

    world = step_world(world, [ActionCommand(verb="Retreat")], [], catalog)
    assert world.players["A"].army_location == "center"


def test_crossing_armies_fight_instead_of_passing(catalog):
    world = initial_world(catalog, seed=0)
    a, b = world.players["A"], world.players["B"]
    a.army = [ArmyUnit("zealot", 60) for _ in range(3)]
    a.army_location = "center"
    b.army = [ArmyUnit("zealot", 60), ArmyUnit("zealot", 60)]

    world = step_world(
        world,
        [ActionCommand(verb="Attack", argument="home_B")],
        [ActionCommand(verb="Attack", argument="home_A")],
        catalog,
    )
    a, b = world.players["A"], world.players["B"]
    assert (a.army_location, b.army_location) == ("center", "home_B")
    assert a.last_combat is not None and a.last_combat.tick == 0
    assert b.last_combat is not None and b.last_combat.tick == 0
    assert [u.hp for u in a.army] == [48, 60, 60]
    assert [u.hp for u in b.army] == [42, 60]
    # nobody reached a home, so no siege
    assert [s.hp for s in a.structures] == [s.hp for s in b.structures] == [1000]


def test_fog_hides_enemy_outside_own_presence(catalog):
    world = initial_world(catalog, seed=0)
    world.players["B"].army = [ArmyUnit("zealot", 60)]
    world.players["B"].army_location = "center"

    o = observe(world, "A", catalog)
    assert o.visible_enemy_army == {}
    assert o.visible_enemy_army_supply == 0
    assert o.visible_enemy_structures == {}

    world = step_world(world, [ActionCommand(verb="Scout", argument="center")], [], catalog)
    o = observe(world, "A", catalog)
    assert o.scouted_region == "center"
    assert o.visible_enemy_army == {"zealot": 1}
    assert o.visible_enemy_region == "center"


def test_reinforcements_are_counted_while_enemy_is_visible(catalog):
    world = initial_world(catalog, seed=0)
    world.players["A"].army = [ArmyUnit("zealot", 60)]
    world.players["A"].army_location = "home_B"
    world.players["B"].minerals = 100
    world.players["B"].army_location = "home_B"

    world = step_world(world, [], [train("zealot")], catalog)
    for _ in range(19):
        world = step_world(world, [], [], catalog)
    # zealot completes in the step of tick 19, combat starts right away
    o = observe(world, "A", catalog)
    assert world.tick == 20
    assert o.enemy_reinforcements == 1


def test_fog_soundness_and_conservation_on_random_episodes(catalog):
    def check(before, after):
        for player, enemy in (("A", "B"), ("B", "A")):
            o = observe(after, player, catalog)
            me, them = after.players[player], after.players[enemy]
            visible = {me.home}
            if me.army:
                visible.add(me.army_location)
            if o.scouted_region:
                visible.add(o.scouted_region)
            if o.visible_enemy_army:
                assert them.army_location in visible
            if o.visible_enemy_structures:
                assert them.home in visible

            arrived = sum(1 for t, _ in me.arrivals if t == before.tick)
            lost = 0
            if me.last_combat is not None and me.last_combat.tick == before.tick:
                lost = me.last_combat.own_losses
            assert len(me.army) == len(before.players[player].army) + arrived - lost

    for seed in range(5):
        _play(catalog, seed, ticks=220, on_step=check)


def test_replays_are_deterministic(catalog):
    digests = {world_digest(_play(catalog, seed=11, ticks=150)) for _ in range(100)}
    assert len(digests) == 1


def test_tick_trace_records(catalog):
    before = initial_world(catalog, seed=0)
    after = step_world(before, [train("probe")], [], catalog)
    records = tick_trace_records(before, after, {"A": [train("probe")], "B": []})

    assert [r["acting_player"] for r in records] == ["A", "B"]
    assert records[0] == {
        "tick": 0,
        "acting_player": "A",
        "actions": ["Train(probe)"],
        "combat_summary": None,
        "resources": {"minerals": 12, "gas": 3},
    }


def test_world_digest_changes_with_state(catalog):
    world = initial_world(catalog, seed=0)
    other = initial_world(catalog, seed=1)
    assert world_digest(world) != world_digest(other)
    assert simulator.world_digest(world) == world_digest(initial_world(catalog, seed=0))
