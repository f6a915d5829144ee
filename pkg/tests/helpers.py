import random
from typing import Dict, Optional

from app.models.world import CombatSummary, Observation


def make_observation(**overrides) -> Observation:
    """Observation of player A at home with nothing visible, fields overridable."""
    values: Dict = dict(
        tick=0,
        player="A",
        own_home="home_A",
        enemy_home="home_B",
        minerals=50,
        gas=0,
        workers=12,
        structures={"nexus": 1},
        production_queue=[],
        army={},
        army_location="home_A",
    )
    values.update(overrides)
    return Observation(**values)


def random_observation(rng: random.Random, tick: Optional[int] = None) -> Observation:
    """Observation with every feature drawn from a small but non-trivial range."""
    army_count = rng.randint(0, 12)
    advanced = rng.randint(0, army_count)
    army = {}
    if army_count - advanced:
        army["zealot"] = army_count - advanced
    if advanced:
        army["stalker"] = advanced
    enemy_count = rng.choice([0, 0, rng.randint(1, 10)])
    enemy_region = rng.choice(["home_A", "center", "home_B"]) if enemy_count else None
    location = rng.choice(["home_A", "center", "home_B"]) if army_count else "home_A"
    tech = rng.randint(0, 1)
    structures = {"nexus": 1}
    if tech:
        structures["cybernetics_core"] = 1
    combat = None
    if rng.random() < 0.3:
        combat = CombatSummary(
            tick=max(0, (tick or 0) - 1),
            own_losses=rng.randint(0, 3),
            enemy_losses=rng.randint(0, 3),
        )
    return make_observation(
        tick=tick if tick is not None else rng.randint(0, 1999),
        minerals=rng.choice([0, 49, 50, 99, 100, 149, 150, 250, 399, 400, 800]),
        gas=rng.choice([0, 25, 50, 99, 100, 300]),
        workers=rng.randint(0, 24),
        structures=structures,
        production_queue=[("probe", rng.randint(1, 12))] * rng.randint(0, 6),
        army=army,
        army_location=location,
        own_army_supply=2 * army_count,
        own_army_count=army_count,
        own_advanced_count=advanced,
        tech_structures=tech,
        tech_pending=rng.randint(0, 1) if not tech else 0,
        visible_enemy_region=enemy_region,
        visible_enemy_army={"zealot": enemy_count} if enemy_count else {},
        visible_enemy_army_supply=2 * enemy_count,
        enemy_reinforcements=rng.randint(0, enemy_count),
        visible_enemy_structures={"nexus": 1} if location == "home_B" and army_count else {},
        last_combat=combat,
    )
