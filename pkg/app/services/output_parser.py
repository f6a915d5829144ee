"""
Output contract between prompt and parser.

A conforming completion is a reasoning paragraph, then one ``[Name]:<value>``
line per strategy variable, then ``Action: Verb(arg)`` lines. Anything else
in the text is ignored; surrounding whitespace and verb case are tolerated.
"""

import re
from typing import Dict, List, Sequence, Tuple

from app.models.actions import ActionCommand, ActionVerdict, ValidityReport, Verdict, normalize_verb
from app.models.catalog import Catalog
from app.models.world import Observation
from app.services.action_rules import OrderBudget, judge

STRATEGY_LINE = re.compile(r"^\s*\[([A-Za-z_][A-Za-z0-9_]*)\]:<([^<>\n]+)>\s*$")
ACTION_LINE = re.compile(r"^\s*Action:\s*(.*?)\s*$")
ACTION_BODY = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(\s*([^()]*?)\s*\))?$")


def extract_strategies(raw: str) -> List[Dict[str, str]]:
    """
    Strategy fragments in order of appearance.

    Consecutive variable lines form one fragment; any other line, or a name
    repeated within the current fragment, starts a new one.
    """
    fragments: List[Dict[str, str]] = []
    current: Dict[str, str] = {}
    for line in raw.splitlines():
        match = STRATEGY_LINE.match(line)
        if not match:
            if current:
                fragments.append(current)
                current = {}
            continue
        name, value = match.group(1), match.group(2).strip()
        if name in current:
            fragments.append(current)
            current = {}
        if value:
            current[name] = value
    if current:
        fragments.append(current)
    return fragments


def extract_actions(raw: str) -> List[ActionCommand]:
    """
    Action candidates in order. Bodies that do not parse keep their raw text
    as the verb so they surface as unknown_verb in the validity report.
    """
    candidates: List[ActionCommand] = []
    for line in raw.splitlines():
        match = ACTION_LINE.match(line)
        if not match:
            continue
        body = match.group(1)
        parsed = ACTION_BODY.match(body)
        if not parsed:
            candidates.append(ActionCommand(verb=body, argument=None))
            continue
        token, argument = parsed.group(1), parsed.group(2) or None
        verb = normalize_verb(token)
        candidates.append(ActionCommand(verb=verb.value if verb else token, argument=argument))
    return candidates


def validate_actions(
    candidates: Sequence[ActionCommand],
    catalog: Catalog,
    o: Observation,
) -> Tuple[List[ActionCommand], ValidityReport]:
    """Keep what is legal now; earlier kept orders reserve their cost."""
    budget = OrderBudget.from_observation(o)
    accepted: List[ActionCommand] = []
    report = ValidityReport()
    for candidate in candidates:
        verdict = judge(candidate, catalog, budget)
        report.verdicts.append(ActionVerdict(action=candidate.render(), verdict=verdict))
        if verdict is Verdict.VALID:
            accepted.append(candidate)
    return accepted, report


def render_output(
    reasoning: str, variables: Dict[str, str], actions: Sequence[ActionCommand]
) -> str:
    """Write a completion in contract form; inverse of the two extractors."""
    lines = [f"Reasoning: {' '.join(reasoning.split())}", ""]
    lines.extend(f"[{name}]:<{value}>" for name, value in variables.items())
    if actions:
        lines.append("")
        lines.extend(f"Action: {action.render()}" for action in actions)
    return "\n".join(lines) + "\n"
