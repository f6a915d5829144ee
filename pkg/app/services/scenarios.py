"""
Hand-built worlds for replaying specific strategic situations.

The reinforcement scenario: the enemy commits a small army into our base
and loses it, we counter-attack, and eight stalkers that were already in
production appear in the enemy base two decision periods later. Under the
default spec the agent goes defensive, aggressive, aggressive and finally
retreats to defensive once the reinforcements are seen.
"""

from app.models.catalog import Catalog
from app.models.world import ArmyUnit, PlayerState, QueueEntry, Structure, WorldState

REINFORCEMENT_DECISION_PERIOD = 8
REINFORCEMENT_TICK_LIMIT = 32


def _side(player: str, catalog: Catalog) -> PlayerState:
    return PlayerState(
        player=player,
        minerals=0,
        gas=0,
        worker_count=0,
        structures=[
            Structure(name, catalog.structure(name).hp) for name in ("nexus", "cybernetics_core")
        ],
        army_location=f"home_{player}",
    )


def reinforcement_scenario(catalog: Catalog, seed: int = 0) -> WorldState:
    agent = _side("A", catalog)
    agent.army = [ArmyUnit("zealot", catalog.unit("zealot").hp) for _ in range(12)]

    enemy = _side("B", catalog)
    enemy.army = [ArmyUnit("zealot", catalog.unit("zealot").hp) for _ in range(4)]
    enemy.army_location = "home_A"
    # completes during the step of tick 20
    enemy.production_queue = [QueueEntry("stalker", 21) for _ in range(8)]

    return WorldState(
        tick=0,
        players={"A": agent, "B": enemy},
        rng_seed=seed,
        tick_limit=REINFORCEMENT_TICK_LIMIT,
    )
