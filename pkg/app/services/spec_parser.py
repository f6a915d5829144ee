"""
Parser for the line-oriented strategy spec format (``*.masmp``).

Sections::

    STATES            one or more state ids per line
    INITIAL <state>   optional, defaults to the first declared state
    VARIABLES         Tactic (implicit) and `Name : default=v state=v ...`
    TRANSITIONS       from -> to : priority : expression : "gloss"
    TREE <name>       reusable behavior tree, referenced as (subtree name)
    POLICY <state>    behavior tree of one state
    RULES             expression => Verb(arg), Verb(arg) : "gloss"

Lines starting with ``#`` are comments. Trees are s-expressions over
selector, sequence, condition, action and subtree and may span lines.
Every error carries the 1-based line and column of the offending construct.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

from app.models.actions import ACTION_SCHEMA, ArgKind, normalize_verb
from app.models.catalog import REGIONS, Catalog
from app.models.machine import (
    ActionLeaf,
    ActionTemplate,
    AtomicRule,
    BTNode,
    Condition,
    MachineSpec,
    Predicate,
    Selector,
    Sequence,
    StrategyVariable,
    TransitionRule,
)
from app.services.predicates import PredicateError, parse_predicate

TACTIC = "Tactic"
BINDINGS = ("@enemy_home", "@own_home")
SECTIONS = ("STATES", "INITIAL", "VARIABLES", "TRANSITIONS", "TREE", "POLICY", "RULES")

_HEADER = re.compile(r"^([A-Z][A-Z_]*)(?:\s+(\S+))?\s*$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_TRANSITION = re.compile(r"^(\w+)\s*->\s*(\w+)\s*:\s*(-?\d+)\s*:\s*(.+?)\s*:\s*\"(.*)\"\s*$")
_RULE = re.compile(r"^(.+?)\s*=>\s*([^:\"]+?)\s*(?::\s*\"(.*)\")?\s*$")
_TEMPLATE = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\(\s*([^()]*?)\s*\))?\s*$")
_TOKEN = re.compile(r"\s*(?:(\()|(\))|\"([^\"]*)\"|([^\s()\"]+))")


class SpecParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class _Token:
    kind: str  # "(", ")", "str", "atom"
    text: str
    line: int
    column: int


@dataclass
class _RawNode:
    """Tree node before subtree references are expanded."""

    kind: str
    line: int
    column: int
    children: List["_RawNode"] = field(default_factory=list)
    text: str = ""


@dataclass
class _TreeBlock:
    name: str
    line: int
    body: List[Tuple[int, str]] = field(default_factory=list)


@dataclass
class _Document:
    states: List[Tuple[str, int]] = field(default_factory=list)
    initial: Optional[Tuple[str, int]] = None
    variables: List[Tuple[str, int, str]] = field(default_factory=list)
    transitions: List[Tuple[int, str]] = field(default_factory=list)
    rules: List[Tuple[int, str]] = field(default_factory=list)
    trees: Dict[str, _TreeBlock] = field(default_factory=dict)
    policies: Dict[str, _TreeBlock] = field(default_factory=dict)


def parse_spec(text: str, catalog: Optional[Catalog] = None) -> MachineSpec:
    """
    Parse and validate a spec document against the unit catalog.

    Raises SpecParseError for unknown sections, states, features, verbs or
    arguments, duplicate priorities, cyclic trees and states without a policy.
    """
    if catalog is None:
        from app.services.catalog import get_catalog

        catalog = get_catalog()

    doc = _split_sections(text.replace("\r\n", "\n").replace("\r", "\n"))
    if not doc.states:
        raise SpecParseError("no states declared", 1)

    states: List[str] = []
    for name, line in doc.states:
        if name in states:
            raise SpecParseError(f"duplicate state {name!r}", line)
        states.append(name)
    declared = set(states)

    initial = states[0]
    if doc.initial is not None:
        initial, line = doc.initial
        if initial not in declared:
            raise SpecParseError(f"unknown state {initial!r} in INITIAL", line)

    variables = _parse_variables(doc.variables, declared)
    transitions = _parse_transitions(doc.transitions, declared)
    context = _TemplateContext(catalog, {v.name: v for v in variables})
    rules = _parse_rules(doc.rules, context)

    raw_trees = {name: _parse_tree(block) for name, block in doc.trees.items()}
    policies: Dict[str, BTNode] = {}
    for state, block in doc.policies.items():
        if state not in declared:
            raise SpecParseError(f"unknown state {state!r} in POLICY", block.line)
        policies[state] = _resolve(_parse_tree(block), raw_trees, context, ())
    for name, line in doc.states:
        if name not in policies:
            raise SpecParseError(f"missing policy for state {name!r}", line)
    # unreferenced trees are still validated
    for name, raw in raw_trees.items():
        _resolve(raw, raw_trees, context, (name,))

    return MachineSpec(
        states=tuple(states),
        initial_state=initial,
        transitions=tuple(transitions),
        policies=policies,
        rules=tuple(rules),
        strategy_variables=tuple(variables),
    )


def _split_sections(text: str) -> _Document:
    doc = _Document()
    section: Optional[str] = None
    block: Optional[_TreeBlock] = None

    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        header = _HEADER.match(line)
        if header:
            name, argument = header.group(1), header.group(2)
            if name not in SECTIONS:
                raise SpecParseError(f"unknown section {name!r}", number)
            section, block = name, None
            if name in ("INITIAL", "TREE", "POLICY"):
                if argument is None:
                    raise SpecParseError(f"{name} needs a name", number, len(name) + 1)
            elif argument is not None:
                raise SpecParseError(f"{name} takes no argument", number, raw.find(argument) + 1)
            if name == "INITIAL":
                if doc.initial is not None:
                    raise SpecParseError("duplicate INITIAL", number)
                doc.initial = (argument, number)
            elif name in ("TREE", "POLICY"):
                target = doc.trees if name == "TREE" else doc.policies
                if argument in target:
                    raise SpecParseError(f"duplicate {name} {argument!r}", number)
                block = target[argument] = _TreeBlock(argument, number)
            continue

        indent = len(raw) - len(raw.lstrip())
        if section == "STATES":
            for match in re.finditer(r"\S+", line):
                if not _IDENT.match(match.group()):
                    raise SpecParseError(
                        f"invalid state id {match.group()!r}", number, indent + match.start() + 1
                    )
                doc.states.append((match.group(), number))
        elif section == "VARIABLES":
            name, _, rest = line.partition(":")
            doc.variables.append((name.strip(), number, rest.strip()))
        elif section == "TRANSITIONS":
            doc.transitions.append((number, raw))
        elif section == "RULES":
            doc.rules.append((number, raw))
        elif block is not None:
            block.body.append((number, raw))
        else:
            raise SpecParseError("content outside of a section", number, indent + 1)
    return doc


def _parse_variables(
    entries: List[Tuple[str, int, str]], states: Set[str]
) -> List[StrategyVariable]:
    variables = [StrategyVariable(TACTIC)]
    for name, line, rest in entries:
        if not _IDENT.match(name):
            raise SpecParseError(f"invalid variable name {name!r}", line)
        if name in (v.name for v in variables[1:]):
            raise SpecParseError(f"duplicate variable {name!r}", line)
        if name == TACTIC:
            if rest:
                raise SpecParseError("Tactic always mirrors the state and takes no values", line)
            continue
        default: Optional[str] = None
        per_state: List[Tuple[str, str]] = []
        for item in rest.split():
            key, sep, value = item.partition("=")
            if not sep or not value or "<" in value or ">" in value:
                raise SpecParseError(f"invalid binding {item!r} for {name}", line)
            if key == "default":
                default = value
            elif key in states:
                per_state.append((key, value))
            else:
                raise SpecParseError(f"unknown state {key!r} in variable {name}", line)
        variables.append(StrategyVariable(name, default, tuple(per_state)))
    return variables


def _parse_transitions(entries: List[Tuple[int, str]], states: Set[str]) -> List[TransitionRule]:
    transitions: List[TransitionRule] = []
    seen: Set[Tuple[str, int]] = set()
    for line, raw in entries:
        match = _TRANSITION.match(raw.strip())
        if not match:
            raise SpecParseError(
                'expected `from -> to : priority : expression : "gloss"`', line
            )
        offset = len(raw) - len(raw.lstrip())
        source, target, priority, expression, gloss = match.groups()
        for group, state in ((1, source), (2, target)):
            if state not in states:
                raise SpecParseError(
                    f"unknown state {state!r}", line, offset + match.start(group) + 1
                )
        key = (source, int(priority))
        if key in seen:
            raise SpecParseError(
                f"duplicate priority {priority} for transitions from {source!r}",
                line,
                offset + match.start(3) + 1,
            )
        seen.add(key)
        predicate = _predicate(expression, line, offset + match.start(4))
        transitions.append(TransitionRule(source, target, int(priority), predicate, gloss))
    return transitions


def _parse_rules(entries: List[Tuple[int, str]], context: "_TemplateContext") -> List[AtomicRule]:
    rules: List[AtomicRule] = []
    for line, raw in entries:
        match = _RULE.match(raw.strip())
        if not match:
            raise SpecParseError('expected `expression => Verb(arg), ... : "gloss"`', line)
        offset = len(raw) - len(raw.lstrip())
        expression, actions_text, gloss = match.groups()
        predicate = _predicate(expression, line, offset + match.start(1))
        templates = []
        column = offset + match.start(2) + 1
        for part in actions_text.split(","):
            lead = len(part) - len(part.lstrip())
            templates.append(context.template(part.strip(), line, column + lead))
            column += len(part) + 1
        rules.append(AtomicRule(predicate, tuple(templates), gloss or predicate.source))
    return rules


def _predicate(expression: str, line: int, start: int) -> Predicate:
    try:
        return parse_predicate(expression)
    except PredicateError as exc:
        raise SpecParseError(str(exc), line, start + exc.column + 1) from exc


class _TemplateContext:
    """Checks action templates against the catalog and declared variables."""

    def __init__(self, catalog: Catalog, variables: Dict[str, StrategyVariable]) -> None:
        self.catalog = catalog
        self.variables = variables

    def template(self, text: str, line: int, column: int) -> ActionTemplate:
        match = _TEMPLATE.match(text)
        if not match:
            raise SpecParseError(f"invalid action {text!r}", line, column)
        verb = normalize_verb(match.group(1))
        if verb is None:
            raise SpecParseError(f"unknown verb {match.group(1)!r}", line, column)
        argument = match.group(2) or None
        kind = ACTION_SCHEMA[verb]
        if kind is ArgKind.NONE:
            if argument is not None:
                raise SpecParseError(f"{verb.value} takes no argument", line, column)
            return ActionTemplate(verb.value)
        if argument is None:
            raise SpecParseError(f"{verb.value} needs an argument", line, column)

        if argument.startswith("$"):
            variable = self.variables.get(argument[1:])
            if variable is None or variable.name == TACTIC:
                raise SpecParseError(f"unknown variable {argument!r}", line, column)
            if not variable.default:
                raise SpecParseError(f"variable {argument!r} needs a default", line, column)
            values = [variable.default] + [value for _, value in variable.per_state]
            for value in values:
                self._check(kind, value, line, column)
        elif argument.startswith("@"):
            if argument not in BINDINGS or kind is not ArgKind.REGION:
                raise SpecParseError(f"unknown argument {argument!r}", line, column)
        else:
            self._check(kind, argument, line, column)
        return ActionTemplate(verb.value, argument)

    def _check(self, kind: ArgKind, value: str, line: int, column: int) -> None:
        known = {
            ArgKind.UNIT: self.catalog.unit(value) is not None,
            ArgKind.STRUCTURE: self.catalog.structure(value) is not None,
            ArgKind.REGION: value in REGIONS,
        }[kind]
        if not known:
            raise SpecParseError(f"unknown argument {value!r}", line, column)


def _tokenize(block: _TreeBlock) -> List[_Token]:
    tokens: List[_Token] = []
    for line, raw in block.body:
        position = 0
        while position < len(raw):
            match = _TOKEN.match(raw, position)
            if not match or match.end() == position:
                if raw[position:].strip():
                    raise SpecParseError("unterminated string", line, position + 1)
                break
            column = match.start(match.lastindex) + 1
            if match.group(1):
                tokens.append(_Token("(", "(", line, column))
            elif match.group(2):
                tokens.append(_Token(")", ")", line, column))
            elif match.group(3) is not None:
                tokens.append(_Token("str", match.group(3), line, column))
            else:
                tokens.append(_Token("atom", match.group(4), line, column))
            position = match.end()
    return tokens


def _parse_tree(block: _TreeBlock) -> _RawNode:
    tokens = _tokenize(block)
    if not tokens:
        raise SpecParseError(f"empty tree {block.name!r}", block.line)
    node, index = _parse_node(tokens, 0, block)
    if index != len(tokens):
        extra = tokens[index]
        raise SpecParseError("trailing content after tree", extra.line, extra.column)
    return node


def _parse_node(tokens: List[_Token], index: int, block: _TreeBlock) -> Tuple[_RawNode, int]:
    def at(i: int) -> _Token:
        if i >= len(tokens):
            last = tokens[-1]
            raise SpecParseError("unbalanced parentheses", last.line, last.column)
        return tokens[i]

    opening = at(index)
    if opening.kind != "(":
        raise SpecParseError(f"expected '(' but got {opening.text!r}", opening.line, opening.column)
    head = at(index + 1)
    if head.kind != "atom":
        raise SpecParseError("expected a node name", head.line, head.column)
    node = _RawNode(head.text, opening.line, opening.column)
    index += 2

    if head.text in ("selector", "sequence"):
        while at(index).kind != ")":
            child, index = _parse_node(tokens, index, block)
            node.children.append(child)
        if not node.children:
            raise SpecParseError(f"{head.text} needs at least one child", head.line, head.column)
    elif head.text in ("condition", "action", "subtree"):
        argument = at(index)
        wanted = "atom" if head.text == "subtree" else "str"
        if argument.kind != wanted:
            raise SpecParseError(
                f"{head.text} expects a {'name' if wanted == 'atom' else 'quoted string'}",
                argument.line,
                argument.column,
            )
        node.text = argument.text
        node.line, node.column = argument.line, argument.column
        index += 1
        closing = at(index)
        if closing.kind != ")":
            raise SpecParseError(f"{head.text} takes one argument", closing.line, closing.column)
    else:
        raise SpecParseError(f"unknown node {head.text!r}", head.line, head.column)
    return node, index + 1


def _resolve(
    raw: _RawNode,
    trees: Dict[str, _RawNode],
    context: _TemplateContext,
    stack: Tuple[str, ...],
) -> BTNode:
    if raw.kind == "subtree":
        if raw.text not in trees:
            raise SpecParseError(f"unknown tree {raw.text!r}", raw.line, raw.column)
        if raw.text in stack:
            cycle = " -> ".join(stack + (raw.text,))
            raise SpecParseError(f"cyclic BT: {cycle}", raw.line, raw.column)
        return _resolve(trees[raw.text], trees, context, stack + (raw.text,))
    if raw.kind == "condition":
        return Condition(_predicate(raw.text, raw.line, raw.column - 1))
    if raw.kind == "action":
        return ActionLeaf(context.template(raw.text, raw.line, raw.column))
    children = tuple(_resolve(child, trees, context, stack) for child in raw.children)
    node: Union[Selector, Sequence] = (
        Selector(children) if raw.kind == "selector" else Sequence(children)
    )
    return node


def load_spec(path: str, catalog: Optional[Catalog] = None) -> MachineSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise RuntimeError(f"cannot read spec {path}: {exc}") from exc
    return parse_spec(text, catalog)
