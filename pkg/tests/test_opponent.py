import pytest

from app.models.world import ArmyUnit, Outcome
from app.services.opponent import (
    PassiveOpponent,
    ScriptedOpponent,
    build_opponent_script,
    run_opponent,
)
from app.services.output_parser import validate_actions
from app.services.simulator import initial_world, observe, step_world, terminal_check


def test_anchor_levels_match_catalog(catalog):
    easiest = build_opponent_script(1, catalog)
    hardest = build_opponent_script(7, catalog)

    assert easiest.income_multiplier_permille == 600
    assert easiest.first_attack_tick == 720
    assert easiest.attack_period == 240
    assert easiest.unit_mix == {"zealot": 500, "adept": 500, "stalker": 0, "immortal": 0}

    assert hardest.income_multiplier_permille == 1400
    assert hardest.first_attack_tick == 300
    assert hardest.attack_period == 120
    assert hardest.unit_mix == {"zealot": 250, "adept": 250, "stalker": 250, "immortal": 250}


def test_middle_level_is_interpolated(catalog):
    script = build_opponent_script(4, catalog)
    assert script.income_multiplier_permille == 1000
    assert script.first_attack_tick == 510
    assert script.attack_period == 180
    assert script.unit_mix == {"zealot": 375, "adept": 375, "stalker": 125, "immortal": 125}


def test_levels_are_monotone(catalog):
    scripts = [build_opponent_script(d, catalog) for d in range(1, 8)]
    for weaker, stronger in zip(scripts, scripts[1:]):
        assert stronger.income_multiplier_permille >= weaker.income_multiplier_permille
        assert stronger.first_attack_tick <= weaker.first_attack_tick
        assert stronger.attack_period <= weaker.attack_period
    for script in scripts:
        assert sum(script.unit_mix.values()) == 1000


@pytest.mark.parametrize("difficulty", [0, 8, -1])
def test_difficulty_out_of_range(catalog, difficulty):
    with pytest.raises(ValueError):
        build_opponent_script(difficulty, catalog)


def test_first_tick_only_trains_a_worker(catalog):
    world = initial_world(catalog, seed=0)
    actions = run_opponent(build_opponent_script(7, catalog), world, catalog)
    assert [a.render() for a in actions] == ["Train(probe)"]


def test_attack_wave_on_schedule(catalog):
    script = build_opponent_script(7, catalog)
    world = initial_world(catalog, seed=0)
    world.players["B"].army_location = "home_B"
    world.tick = script.first_attack_tick

    # ohne Armee kein Angriff
    assert "Attack(home_A)" not in [a.render() for a in run_opponent(script, world, catalog)]

    world.players["B"].army = [ArmyUnit("zealot", 60)]
    assert "Attack(home_A)" in [a.render() for a in run_opponent(script, world, catalog)]

    world.tick = script.first_attack_tick + 1
    assert "Attack(home_A)" not in [a.render() for a in run_opponent(script, world, catalog)]


def test_same_world_same_orders(catalog):
    script = build_opponent_script(5, catalog)
    world = initial_world(catalog, seed=42)
    world.players["B"].minerals = 2000
    world.players["B"].gas = 500
    first = run_opponent(script, world, catalog)
    for _ in range(20):
        assert run_opponent(script, world, catalog) == first


def test_orders_always_pass_validation(catalog):
    """Opponent orders are never rejected over a full scripted game."""
    for difficulty in (1, 4, 7):
        script = build_opponent_script(difficulty, catalog)
        opponent = ScriptedOpponent(script)
        world = initial_world(
            catalog, seed=difficulty, tick_limit=600,
            income_multiplier_permille={"B": script.income_multiplier_permille},
        )
        while terminal_check(world) is Outcome.ONGOING:
            orders = opponent.actions(world, "B", catalog)
            accepted, report = validate_actions(orders, catalog, observe(world, "B", catalog))
            assert report.rejected == 0
            world = step_world(world, [], accepted, catalog)


def test_passive_opponent_never_acts(catalog):
    world = initial_world(catalog, seed=0)
    assert PassiveOpponent().actions(world, "B", catalog) == []
