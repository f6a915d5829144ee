"""
Renders the state-machine prompt and the memoryless baseline prompt.

Templates are text assets with ``{{ key }}`` placeholders. Substitution is a
single pass, so observation text can never be re-expanded, and all line
endings are normalized to ``\\n``.
"""

import hashlib
import re
from functools import lru_cache
from typing import Dict, List, Optional

from app.config import ASSETS_DIR
from app.models.machine import (
    ActionLeaf,
    BTNode,
    Condition,
    MachineSpec,
    Selector,
)
from app.models.memory import StrategyRecord
from app.models.world import Observation
from app.services.spec_parser import TACTIC

PLACEHOLDER = re.compile(r"\{\{ (\w+) \}\}")
NO_PRIOR_STRATEGY = "No prior strategy: this is the first decision of the match."
NO_ENEMY_VISIBLE = "no enemy units visible"


@lru_cache(maxsize=4)
def load_template(name: str) -> str:
    text = (ASSETS_DIR / f"{name}.txt").read_text(encoding="utf-8")
    return _normalize(text)


def render_template(template: str, **values: str) -> str:
    def replace(match: "re.Match[str]") -> str:
        key = match.group(1)
        if key not in values:
            raise KeyError(f"no value for placeholder {key!r}")
        return values[key]

    return _normalize(PLACEHOLDER.sub(replace, template))


def _normalize(text: str) -> str:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return text.rstrip("\n") + "\n"


def _counts(items: Dict[str, int]) -> str:
    return ", ".join(f"{name}={count}" for name, count in items.items()) or "none"


def render_observation(o: Observation) -> str:
    """Stable key-value rendering of every observation field."""
    queue = ", ".join(f"{item}({remaining})" for item, remaining in o.production_queue)
    combat = "none"
    if o.last_combat is not None:
        combat = (
            f"tick {o.last_combat.tick}, own losses {o.last_combat.own_losses}, "
            f"enemy losses {o.last_combat.enemy_losses}"
        )
    lines = [
        f"tick: {o.tick}",
        f"player: {o.player}",
        f"own_home: {o.own_home}",
        f"enemy_home: {o.enemy_home}",
        f"minerals: {o.minerals}",
        f"gas: {o.gas}",
        f"workers: {o.workers}",
        f"structures: {_counts(o.structures)}",
        f"production_queue: {queue or 'none'}",
        f"army: {_counts(o.army)}",
        f"army_location: {o.army_location}",
        f"own_army_supply: {o.own_army_supply}",
        f"own_army_count: {o.own_army_count}",
        f"own_advanced_count: {o.own_advanced_count}",
        f"tech_structures: {o.tech_structures}",
        f"tech_pending: {o.tech_pending}",
        f"scouted_region: {o.scouted_region or 'none'}",
        f"visible_enemy_region: {o.visible_enemy_region or 'none'}",
        f"visible_enemy_army: {_counts(o.visible_enemy_army) if o.visible_enemy_army else NO_ENEMY_VISIBLE}",
        f"visible_enemy_army_supply: {o.visible_enemy_army_supply}",
        f"enemy_reinforcements: {o.enemy_reinforcements}",
        f"visible_enemy_structures: {_counts(o.visible_enemy_structures)}",
        f"last_combat: {combat}",
    ]
    return "\n".join(lines)


def _render_states(spec: MachineSpec) -> str:
    lines = [f"Initial state: <{spec.initial_state}>"]
    lines.extend(f"- <{state}>" for state in spec.states)
    return "\n".join(lines)


def _render_transitions(spec: MachineSpec) -> str:
    lines = []
    for state in spec.states:
        for t in spec.transitions_from(state):
            lines.append(f"- <{t.from_state}> -> <{t.to_state}> (priority {t.priority}): {t.nl_gloss}")
    return "\n".join(lines) or "- none"


def _render_tree(node: BTNode, depth: int, lines: List[str]) -> None:
    pad = "  " * depth
    if isinstance(node, Condition):
        lines.append(f"{pad}IF {node.predicate.source}")
    elif isinstance(node, ActionLeaf):
        lines.append(f"{pad}DO {node.template.render()}")
    else:
        lines.append(f"{pad}{'SELECTOR' if isinstance(node, Selector) else 'SEQUENCE'}")
        for child in node.children:
            _render_tree(child, depth + 1, lines)


def _render_policies(spec: MachineSpec) -> str:
    lines: List[str] = []
    for state in spec.states:
        bound = [
            f"{v.name}={v.value_for(state) or v.default}"
            for v in spec.strategy_variables
            if v.name != TACTIC and (v.value_for(state) or v.default)
        ]
        suffix = f" ({', '.join(bound)})" if bound else ""
        lines.append(f"<{state}>{suffix}:")
        _render_tree(spec.policies[state], 1, lines)
    return "\n".join(lines)


def _render_rules(spec: MachineSpec) -> str:
    lines = [
        f"- {rule.nl_gloss} => {', '.join(t.render() for t in rule.actions)}"
        for rule in spec.rules
    ]
    return "\n".join(lines) or "- none"


def _render_variable_lines(spec: MachineSpec) -> str:
    return "\n".join(
        f"[{name}]:<{'state id' if name == TACTIC else 'value'}>" for name in spec.variable_names
    )


def render_memory(last: Optional[StrategyRecord]) -> str:
    if last is None:
        return NO_PRIOR_STRATEGY
    lines = [f"Stored at tick {last.timestep}:"]
    lines.extend(f"[{name}]:<{value}>" for name, value in last.variables.items())
    return "\n".join(lines)


def compile_prompt(spec: MachineSpec, obs_text: str, last: Optional[StrategyRecord]) -> str:
    """Observation, state-machine prompt and latest strategy in one text."""
    return render_template(
        load_template("prompt_template"),
        states=_render_states(spec),
        transitions=_render_transitions(spec),
        policies=_render_policies(spec),
        rules=_render_rules(spec),
        variable_lines=_render_variable_lines(spec),
        observation=_normalize(obs_text).rstrip("\n"),
        memory=render_memory(last),
    )


def compile_baseline_prompt(obs_text: str) -> str:
    return render_template(
        load_template("baseline_template"),
        observation=_normalize(obs_text).rstrip("\n"),
    )


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()
