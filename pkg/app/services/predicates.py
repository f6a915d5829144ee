"""
Feature catalog and predicate language of the strategy machine.

Predicates are written in a small Python-like expression syntax
(``own_army_supply >= 2 * visible_enemy_army_supply and tick > 60``),
parsed with ``ast`` into the frozen expression types of app.models.machine
and evaluated against the features of one Observation.
"""

import ast
import operator
from typing import Callable, Dict, List, Union

from app.models.machine import (
    And,
    Arith,
    Compare,
    Feature,
    Not,
    Number,
    Or,
    Predicate,
    PredicateExpr,
    Term,
    Truth,
)
from app.models.world import Observation


class PredicateError(ValueError):
    """A predicate that does not parse or names an unknown feature."""

    def __init__(self, message: str, column: int = 0) -> None:
        super().__init__(message)
        self.column = column


def _enemy_at_home(o: Observation) -> int:
    return o.visible_enemy_army_supply if o.visible_enemy_region == o.own_home else 0


def _advanced_fraction(o: Observation) -> float:
    return o.own_advanced_count / o.own_army_count if o.own_army_count else 0.0


# feature name -> extractor; every feature is derived from the Observation alone
FEATURES: Dict[str, Callable[[Observation], Union[int, float]]] = {
    "tick": lambda o: o.tick,
    "minerals": lambda o: o.minerals,
    "gas": lambda o: o.gas,
    "workers": lambda o: o.workers,
    "own_army_supply": lambda o: o.own_army_supply,
    "own_army_count": lambda o: o.own_army_count,
    "own_advanced_count": lambda o: o.own_advanced_count,
    "advanced_fraction": _advanced_fraction,
    "visible_enemy_army_supply": lambda o: o.visible_enemy_army_supply,
    "visible_enemy_army_count": lambda o: sum(o.visible_enemy_army.values()),
    "enemy_reinforcements": lambda o: o.enemy_reinforcements,
    "tech_structures": lambda o: o.tech_structures,
    "tech_pending": lambda o: o.tech_pending,
    "structures": lambda o: sum(o.structures.values()),
    "queue_length": lambda o: len(o.production_queue),
    "army_at_home": lambda o: int(o.own_army_count > 0 and o.army_location == o.own_home),
    "army_in_center": lambda o: int(o.own_army_count > 0 and o.army_location == "center"),
    "army_at_enemy_home": lambda o: int(
        o.own_army_count > 0 and o.army_location == o.enemy_home
    ),
    "enemy_at_home": _enemy_at_home,
    "enemy_structures_visible": lambda o: sum(o.visible_enemy_structures.values()),
    "last_own_losses": lambda o: o.last_combat.own_losses if o.last_combat else 0,
    "last_enemy_losses": lambda o: o.last_combat.enemy_losses if o.last_combat else 0,
}


def observation_features(o: Observation) -> Dict[str, Union[int, float]]:
    return {name: extract(o) for name, extract in FEATURES.items()}


_COMPARE_OPS = {
    ast.Lt: "<",
    ast.LtE: "<=",
    ast.Eq: "==",
    ast.NotEq: "!=",
    ast.GtE: ">=",
    ast.Gt: ">",
}
_ARITH_OPS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*"}


def parse_predicate(source: str) -> Predicate:
    """
    Parse one predicate; raises PredicateError with the 0-based column of the
    offending construct.
    """
    text = source.strip()
    if not text:
        raise PredicateError("empty predicate")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise PredicateError(f"invalid predicate syntax: {text}", (exc.offset or 1) - 1) from exc
    return Predicate(expr=_to_bool(tree.body), source=text)


def _to_bool(node: ast.AST) -> PredicateExpr:
    if isinstance(node, ast.BoolOp):
        items = tuple(_to_bool(value) for value in node.values)
        return And(items) if isinstance(node.op, ast.And) else Or(items)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
        return Not(_to_bool(node.operand))
    if isinstance(node, ast.Compare):
        # a < b <= c is read as (a < b) and (b <= c)
        terms = [_to_term(node.left)] + [_to_term(c) for c in node.comparators]
        parts: List[PredicateExpr] = []
        for index, op in enumerate(node.ops):
            symbol = _COMPARE_OPS.get(type(op))
            if symbol is None:
                raise PredicateError(
                    f"unsupported comparison {type(op).__name__}", node.col_offset
                )
            parts.append(Compare(symbol, terms[index], terms[index + 1]))
        return parts[0] if len(parts) == 1 else And(tuple(parts))
    if isinstance(node, ast.Constant) and isinstance(node.value, bool):
        return Truth(node.value)
    raise PredicateError(
        f"expected a comparison or boolean expression, got {type(node).__name__}",
        getattr(node, "col_offset", 0),
    )


def _to_term(node: ast.AST) -> Term:
    if isinstance(node, ast.Name):
        if node.id not in FEATURES:
            raise PredicateError(f"unknown feature {node.id!r}", node.col_offset)
        return Feature(node.id)
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return Number(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _to_term(node.operand)
        if isinstance(inner, Number):
            return Number(-inner.value)
        return Arith("-", Number(0), inner)
    if isinstance(node, ast.BinOp):
        symbol = _ARITH_OPS.get(type(node.op))
        if symbol is None:
            raise PredicateError(
                f"unsupported operator {type(node.op).__name__}", node.col_offset
            )
        return Arith(symbol, _to_term(node.left), _to_term(node.right))
    raise PredicateError(
        f"unsupported term {type(node).__name__}", getattr(node, "col_offset", 0)
    )


_COMPARE_FUNCS = {
    "<": operator.lt,
    "<=": operator.le,
    "==": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    ">": operator.gt,
}
_ARITH_FUNCS = {"+": operator.add, "-": operator.sub, "*": operator.mul}


def evaluate_predicate(predicate: Union[Predicate, PredicateExpr], o: Observation) -> bool:
    """Total and pure: every well-formed predicate yields a bool on every observation."""
    expr = predicate.expr if isinstance(predicate, Predicate) else predicate
    return _evaluate(expr, observation_features(o))


def _evaluate(expr: PredicateExpr, features: Dict[str, Union[int, float]]) -> bool:
    if isinstance(expr, Compare):
        return _COMPARE_FUNCS[expr.op](_value(expr.left, features), _value(expr.right, features))
    if isinstance(expr, And):
        return all(_evaluate(item, features) for item in expr.items)
    if isinstance(expr, Or):
        return any(_evaluate(item, features) for item in expr.items)
    if isinstance(expr, Not):
        return not _evaluate(expr.item, features)
    return expr.value


def _value(term: Term, features: Dict[str, Union[int, float]]) -> Union[int, float]:
    if isinstance(term, Feature):
        return features[term.name]
    if isinstance(term, Number):
        return term.value
    return _ARITH_FUNCS[term.op](_value(term.left, features), _value(term.right, features))
