"""
Decision loop of the agent and the episode runner.

In masmp mode one decision step reads the latest stored strategy, builds the
state-machine prompt, generates, stores the first extracted strategy block
and executes the validated actions. Baseline mode uses the memoryless prompt
and never touches memory.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from app.models.actions import ActionCommand, Verdict
from app.models.agent import AgentConfig, AgentMode, DecisionStepTrace
from app.models.backend import AttemptRecord, DecisionContext, GenerationRequest
from app.models.catalog import Catalog
from app.models.evaluation import MatchOutcome, MatchResult
from app.models.memory import StrategyRecord
from app.models.world import Observation, OpponentScript, Outcome, WorldState
from app.services.backends import Backend, BackendError, build_backend, close_backend
from app.services.memory_store import MemoryDB, MemoryOrderError
from app.services.opponent import Opponent, ScriptedOpponent
from app.services.output_parser import extract_actions, extract_strategies, validate_actions
from app.services.prompt_compiler import (
    compile_baseline_prompt,
    compile_prompt,
    prompt_sha256,
    render_observation,
)
from app.services.simulator import (
    initial_world,
    observe,
    step_world,
    terminal_check,
    tick_trace_records,
)
from app.services.spec_parser import TACTIC
from app.services.symbolic import StaleMemoryError

logger = logging.getLogger(__name__)

_OUTCOMES = {
    Outcome.WIN_A: MatchOutcome.WIN,
    Outcome.WIN_B: MatchOutcome.LOSS,
    Outcome.DRAW: MatchOutcome.DRAW,
}


class DecisionLoop:
    """One agent with its backend; memory is passed in per step."""

    def __init__(
        self,
        cfg: AgentConfig,
        catalog: Catalog,
        backend: Optional[Backend] = None,
        seed: Optional[int] = None,
    ) -> None:
        self.cfg = cfg
        self.catalog = catalog
        self._owns_backend = backend is None
        self.backend = backend or build_backend(cfg.backend, cfg.spec, catalog)
        self.seed = seed

    def close(self) -> None:
        """Close the backend if this loop built it."""
        if self._owns_backend:
            close_backend(self.backend)

    def build_prompt(self, o: Observation, last: Optional[StrategyRecord]) -> str:
        obs_text = render_observation(o)
        if self.cfg.mode is AgentMode.BASELINE:
            return compile_baseline_prompt(obs_text)
        return compile_prompt(self.cfg.spec, obs_text, last)

    def decide_step(
        self, db: MemoryDB, o: Observation, t: int
    ) -> Tuple[List[ActionCommand], MemoryDB, DecisionStepTrace]:
        masmp = self.cfg.mode is AgentMode.MASMP
        last = db.get_latest() if masmp else None
        if last is not None and t <= last.timestep:
            raise MemoryOrderError(f"decision at {t} does not follow stored timestep {last.timestep}")

        prompt = self.build_prompt(o, last)
        trace = DecisionStepTrace(
            timestep=t,
            mode=self.cfg.mode,
            prompt_sha256=prompt_sha256(prompt),
            state=last.tactic if last is not None else None,
        )
        request = GenerationRequest(
            prompt=prompt,
            max_tokens=self.cfg.max_tokens,
            temperature=self.cfg.temperature,
            seed=self.seed,
            context=DecisionContext(observation=o, last=last),
        )

        raw = self._generate(request, trace)
        if raw is None:
            return [], db, trace
        trace.raw_output = raw

        strategies = extract_strategies(raw)
        trace.extracted_strategies = strategies
        if strategies:
            fragment = strategies[0]
            if len(strategies) > 1:
                logger.warning(
                    "tick %d: %d strategy blocks, only the first is used", t, len(strategies)
                )
                trace.flags.append("extra_strategy_blocks")
            if masmp:
                tactic = fragment.get(TACTIC)
                if tactic in self.cfg.spec.states:
                    db.add_memory(fragment, t)
                else:
                    logger.warning("tick %d: unknown tactic %r not stored", t, tactic)
                    trace.flags.append("unknown_tactic")
            else:
                trace.state = fragment.get(TACTIC)

        accepted, report = validate_actions(extract_actions(raw), self.catalog, o)
        if report.rejected:
            rejected = [v.action for v in report.verdicts if v.verdict is not Verdict.VALID]
            logger.debug("tick %d: rejected %s", t, rejected)
        trace.validity_report = report
        trace.executed_actions = [a.render() for a in accepted]
        if masmp:
            latest = db.get_latest()
            trace.memory_latest_after = dict(latest.variables) if latest else None
            trace.state = latest.tactic if latest else None
        return accepted, db, trace

    def _generate(self, request: GenerationRequest, trace: DecisionStepTrace) -> Optional[str]:
        """Up to 1 + retry_budget attempts; None means hold."""
        for attempt in range(1, self.cfg.retry_budget + 2):
            try:
                raw = self.backend.generate(request)
            except StaleMemoryError as exc:
                trace.attempts.append(AttemptRecord(attempt=attempt, ok=False, error=str(exc)))
                trace.failure = f"stale memory: {exc}"
                logger.warning("tick %d: %s", trace.timestep, trace.failure)
                return None
            except BackendError as exc:
                trace.attempts.append(AttemptRecord(attempt=attempt, ok=False, error=str(exc)))
                logger.warning("tick %d attempt %d failed: %s", trace.timestep, attempt, exc)
                continue
            trace.attempts.append(AttemptRecord(attempt=attempt, ok=True))
            return raw
        trace.failure = f"transport: {trace.attempts[-1].error}"
        return None


@dataclass
class EpisodeOutcome:
    result: MatchResult
    traces: List[DecisionStepTrace]
    tick_records: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def states(self) -> List[Optional[str]]:
        return [trace.state for trace in self.traces]


def run_agent_episode(
    cfg: AgentConfig,
    seed: int,
    opponent: Union[OpponentScript, Opponent],
    tick_limit: int,
    catalog: Catalog,
    backend: Optional[Backend] = None,
    world: Optional[WorldState] = None,
    record_ticks: bool = False,
) -> EpisodeOutcome:
    """
    Alternate simulator ticks and decisions every decision_period ticks until
    the match is decided. The opponent's orders pass the same validation as
    the agent's; memory starts empty every episode. A supplied `world` plays
    under `tick_limit` as well.
    """
    difficulty = 1
    if isinstance(opponent, OpponentScript):
        difficulty = opponent.difficulty
        if world is None:
            world = initial_world(
                catalog, seed, tick_limit, {"B": opponent.income_multiplier_permille}
            )
        opponent = ScriptedOpponent(opponent)
    if world is None:
        world = initial_world(catalog, seed, tick_limit)
    elif world.tick_limit != tick_limit:
        world = world.copy()
        world.tick_limit = tick_limit

    loop = DecisionLoop(cfg, catalog, backend, seed)
    db = MemoryDB()
    traces: List[DecisionStepTrace] = []
    tick_records: List[Dict[str, Any]] = []
    cutoff = catalog.economy.production_cutoff_tick
    early: Optional[Dict[str, int]] = None
    logger.info("episode start: mode=%s difficulty=%d seed=%d", cfg.mode.value, difficulty, seed)

    try:
        while terminal_check(world) is Outcome.ONGOING:
            actions_a: List[ActionCommand] = []
            if world.tick % cfg.decision_period == 0:
                o = observe(world, "A", catalog)
                actions_a, db, trace = loop.decide_step(db, o, world.tick)
                traces.append(trace)

            candidates_b = opponent.actions(world, "B", catalog)
            actions_b, report_b = validate_actions(
                candidates_b, catalog, observe(world, "B", catalog)
            )
            if report_b.rejected:
                logger.debug(
                    "tick %d: opponent orders rejected: %s", world.tick, report_b.summary()
                )

            before = world
            world = step_world(world, actions_a, actions_b, catalog)
            if record_ticks:
                orders = {"A": actions_a, "B": actions_b}
                tick_records.extend(tick_trace_records(before, world, orders))
            if early is None and world.tick >= cutoff:
                early = dict(world.players["A"].produced)
    finally:
        loop.close()

    outcome = _OUTCOMES[terminal_check(world)]
    early_counts = early if early is not None else world.players["A"].produced
    result = MatchResult(
        outcome=outcome,
        final_tick=world.tick,
        seed=seed,
        difficulty=difficulty,
        mode=cfg.mode,
        production=dict(sorted(world.players["A"].produced.items())),
        opponent_production=dict(sorted(world.players["B"].produced.items())),
        early_production=dict(sorted(early_counts.items())),
        cutoff_tick=cutoff,
    )
    logger.info(
        "episode end: mode=%s difficulty=%d seed=%d outcome=%s tick=%d",
        cfg.mode.value, difficulty, seed, outcome.value, world.tick,
    )
    return EpisodeOutcome(result=result, traces=traces, tick_records=tick_records)


def write_jsonl(path: Union[str, Path], lines: List[str]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")
    return target


def write_trace(traces: List[DecisionStepTrace], path: Union[str, Path]) -> Path:
    return write_jsonl(path, [trace.model_dump_json() for trace in traces])


def write_tick_records(records: List[Dict[str, Any]], path: Union[str, Path]) -> Path:
    return write_jsonl(path, [json.dumps(record, sort_keys=True) for record in records])


def read_trace(path: Union[str, Path]) -> List[DecisionStepTrace]:
    text = Path(path).read_text(encoding="utf-8")
    return [DecisionStepTrace.model_validate_json(line) for line in text.splitlines() if line.strip()]
