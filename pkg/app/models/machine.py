"""
Types of the declarative strategy machine: predicates over observation
features, behavior-tree nodes, transitions, atomic rules and the spec itself.

All of them are frozen dataclasses so a parsed MachineSpec can be shared
between parallel episodes.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple, Union

# -- predicates -------------------------------------------------------------


@dataclass(frozen=True)
class Feature:
    name: str


@dataclass(frozen=True)
class Number:
    value: Union[int, float]


@dataclass(frozen=True)
class Arith:
    op: str  # "+", "-", "*"
    left: "Term"
    right: "Term"


Term = Union[Feature, Number, Arith]


@dataclass(frozen=True)
class Compare:
    op: str  # "<", "<=", "==", "!=", ">=", ">"
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    items: Tuple["PredicateExpr", ...]


@dataclass(frozen=True)
class Or:
    items: Tuple["PredicateExpr", ...]


@dataclass(frozen=True)
class Not:
    item: "PredicateExpr"


@dataclass(frozen=True)
class Truth:
    value: bool


PredicateExpr = Union[Compare, And, Or, Not, Truth]


@dataclass(frozen=True)
class Predicate:
    """A parsed condition together with the source text it came from."""

    expr: PredicateExpr
    source: str


# -- actions and behavior trees --------------------------------------------


@dataclass(frozen=True)
class ActionTemplate:
    """Verb plus an argument that may be a literal, `$Variable` or `@binding`."""

    verb: str
    argument: Optional[str] = None

    def render(self) -> str:
        return f"{self.verb}({self.argument or ''})"


@dataclass(frozen=True)
class Selector:
    children: Tuple["BTNode", ...]


@dataclass(frozen=True)
class Sequence:
    children: Tuple["BTNode", ...]


@dataclass(frozen=True)
class Condition:
    predicate: Predicate


@dataclass(frozen=True)
class ActionLeaf:
    template: ActionTemplate


BTNode = Union[Selector, Sequence, Condition, ActionLeaf]


# -- machine ------------------------------------------------------------------


@dataclass(frozen=True)
class TransitionRule:
    from_state: str
    to_state: str
    priority: int
    predicate: Predicate
    nl_gloss: str


@dataclass(frozen=True)
class AtomicRule:
    predicate: Predicate
    actions: Tuple[ActionTemplate, ...]
    nl_gloss: str


@dataclass(frozen=True)
class StrategyVariable:
    """A declared strategy variable; Tactic always mirrors the current state."""

    name: str
    default: Optional[str] = None
    per_state: Tuple[Tuple[str, str], ...] = ()

    def value_for(self, state: str) -> Optional[str]:
        for state_id, value in self.per_state:
            if state_id == state:
                return value
        return None


@dataclass(frozen=True)
class MachineSpec:
    states: Tuple[str, ...]
    initial_state: str
    transitions: Tuple[TransitionRule, ...]
    policies: Dict[str, BTNode] = field(hash=False)
    rules: Tuple[AtomicRule, ...]
    strategy_variables: Tuple[StrategyVariable, ...]

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.strategy_variables)

    def transitions_from(self, state: str) -> Tuple[TransitionRule, ...]:
        """Outgoing transitions ordered by priority, lowest first."""
        return tuple(
            sorted(
                (t for t in self.transitions if t.from_state == state),
                key=lambda t: t.priority,
            )
        )
