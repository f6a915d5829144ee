import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from app.models.actions import ActionCommand
from app.models.machine import (
    ActionLeaf,
    ActionTemplate,
    BTNode,
    Condition,
    MachineSpec,
    Selector,
    Sequence,
    TransitionRule,
)
from app.models.memory import StrategyRecord
from app.models.world import Observation
from app.services.predicates import evaluate_predicate
from app.services.spec_parser import TACTIC

logger = logging.getLogger(__name__)


class StaleMemoryError(RuntimeError):
    """The stored Tactic names a state the spec does not declare."""


class Status(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"


@dataclass(frozen=True)
class SymbolicDecision:
    previous_state: str
    state: str
    fired: Optional[TransitionRule]
    record: StrategyRecord
    actions: Tuple[ActionCommand, ...]


def resolve_state(spec: MachineSpec, prev: Optional[StrategyRecord]) -> str:
    if prev is None or not prev.tactic:
        return spec.initial_state
    if prev.tactic not in spec.states:
        raise StaleMemoryError(f"stored tactic {prev.tactic!r} is not a declared state")
    return prev.tactic


def fire_transition(
    spec: MachineSpec, state: str, o: Observation
) -> Optional[TransitionRule]:
    """The lowest-priority-number transition out of `state` whose predicate holds."""
    for transition in spec.transitions_from(state):
        if evaluate_predicate(transition.predicate, o):
            return transition
    return None


def instantiate(template: ActionTemplate, o: Observation, variables: Dict[str, str]) -> ActionCommand:
    argument = template.argument
    if argument is not None:
        if argument.startswith("$"):
            argument = variables[argument[1:]]
        elif argument == "@enemy_home":
            argument = o.enemy_home
        elif argument == "@own_home":
            argument = o.own_home
    return ActionCommand(verb=template.verb, argument=argument)


def tick_tree(
    node: BTNode, o: Observation, variables: Dict[str, str], emitted: List[ActionCommand]
) -> Status:
    """
    One memoryless tick. Actions emitted by an ActionLeaf stay emitted even if
    a later sibling of the enclosing sequence fails.
    """
    if isinstance(node, Selector):
        for child in node.children:
            if tick_tree(child, o, variables, emitted) is Status.SUCCESS:
                return Status.SUCCESS
        return Status.FAILURE
    if isinstance(node, Sequence):
        for child in node.children:
            if tick_tree(child, o, variables, emitted) is Status.FAILURE:
                return Status.FAILURE
        return Status.SUCCESS
    if isinstance(node, Condition):
        return Status.SUCCESS if evaluate_predicate(node.predicate, o) else Status.FAILURE
    if isinstance(node, ActionLeaf):
        emitted.append(instantiate(node.template, o, variables))
        return Status.SUCCESS
    raise TypeError(f"unknown behavior tree node {node!r}")


def symbolic_execute(
    spec: MachineSpec, o: Observation, prev: Optional[StrategyRecord]
) -> SymbolicDecision:
    """
    Deterministic ground-truth decision for one step.

    Resolve the state from prev's Tactic, fire at most one transition, derive
    the strategy variables, tick the state's tree and append every atomic
    rule whose predicate holds.
    """
    previous = resolve_state(spec, prev)
    fired = fire_transition(spec, previous, o)
    state = fired.to_state if fired else previous

    prev_vars = prev.variables if prev is not None else {}
    variables: Dict[str, str] = {}
    for variable in spec.strategy_variables:
        if variable.name == TACTIC:
            variables[TACTIC] = state
            continue
        value = variable.value_for(state) or prev_vars.get(variable.name) or variable.default
        if value:
            variables[variable.name] = value

    emitted: List[ActionCommand] = []
    tick_tree(spec.policies[state], o, variables, emitted)
    for rule in spec.rules:
        if evaluate_predicate(rule.predicate, o):
            emitted.extend(instantiate(t, o, variables) for t in rule.actions)

    if fired is not None:
        logger.debug("tick %d: <%s> -> <%s>", o.tick, previous, state)
    return SymbolicDecision(
        previous_state=previous,
        state=state,
        fired=fired,
        record=StrategyRecord(timestep=o.tick, variables=variables),
        actions=tuple(emitted),
    )
