"""
Evaluation matrix: seeded episodes per (mode, difficulty) cell, win rates,
early-game production metrics and the report / results / trace artifacts.
"""

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.models.agent import AgentConfig, AgentMode, DecisionStepTrace
from app.models.backend import HealthStatus
from app.models.catalog import Catalog, Tier
from app.models.evaluation import (
    EvalConfig,
    EvalReport,
    EvalRow,
    MatchOutcome,
    MatchResult,
    ProductionMetrics,
)
from app.models.machine import MachineSpec
from app.services.backends import BackendConfigError, build_backend, close_backend, health_check
from app.services.catalog import get_catalog
from app.services.opponent import build_opponent_script
from app.services.orchestrator import run_agent_episode, write_jsonl, write_trace
from app.services.spec_parser import load_spec

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "mode",
    "difficulty",
    "episodes",
    "wins",
    "draws",
    "losses",
    "win_rate",
    "mean_advanced_units",
    "mean_total_units",
    "advanced_ratio",
    "production_empty",
]


class EmptyResultsError(ValueError):
    """Win rate or production metrics asked for zero episodes."""


def win_rate(results: Sequence[MatchResult]) -> float:
    """Wins over all episodes times 100; draws and losses only count in the denominator."""
    if not results:
        raise EmptyResultsError("win rate of zero episodes is undefined")
    wins = sum(1 for r in results if r.outcome is MatchOutcome.WIN)
    return float(Fraction(wins * 100, len(results)))


def production_metrics(results: Sequence[MatchResult], catalog: Catalog) -> ProductionMetrics:
    """
    Army units completed up to each episode's cutoff tick, averaged over
    episodes. Workers and structures are not counted.
    """
    if not results:
        raise EmptyResultsError("production metrics of zero episodes are undefined")
    army = {u.name: u.tier for u in catalog.army_units}
    per_type: Dict[str, int] = {name: 0 for name in army}
    for result in results:
        for name, count in result.early_production.items():
            if name in per_type:
                per_type[name] += count

    total = sum(per_type.values())
    advanced = sum(count for name, count in per_type.items() if army[name] is Tier.ADVANCED)
    n = len(results)
    if total == 0:
        return ProductionMetrics(
            mean_advanced=0.0,
            mean_total=0.0,
            advanced_ratio=0.0,
            shares={name: 0.0 for name in per_type},
            empty=True,
        )
    return ProductionMetrics(
        mean_advanced=float(Fraction(advanced, n)),
        mean_total=float(Fraction(total, n)),
        advanced_ratio=float(Fraction(advanced * 100, total)),
        shares={name: float(Fraction(count * 100, total)) for name, count in per_type.items()},
    )


def build_report(results: Sequence[MatchResult], catalog: Catalog) -> EvalReport:
    cells: Dict[Tuple[str, int], List[MatchResult]] = {}
    for result in results:
        cells.setdefault((result.mode.value, result.difficulty), []).append(result)

    rows = []
    for (mode, difficulty), cell in sorted(cells.items()):
        rows.append(
            EvalRow(
                mode=AgentMode(mode),
                difficulty=difficulty,
                episodes=len(cell),
                wins=sum(1 for r in cell if r.outcome is MatchOutcome.WIN),
                draws=sum(1 for r in cell if r.outcome is MatchOutcome.DRAW),
                losses=sum(1 for r in cell if r.outcome is MatchOutcome.LOSS),
                win_rate=win_rate(cell),
                production=production_metrics(cell, catalog),
            )
        )
    return EvalReport(rows=rows, unit_types=[u.name for u in catalog.army_units])


def report_csv(report: EvalReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS + [f"share_{name}" for name in report.unit_types])
    for row in report.rows:
        p = row.production
        writer.writerow(
            [
                row.mode.value,
                row.difficulty,
                row.episodes,
                row.wins,
                row.draws,
                row.losses,
                f"{row.win_rate:.2f}",
                f"{p.mean_advanced:.2f}",
                f"{p.mean_total:.2f}",
                f"{p.advanced_ratio:.2f}",
                int(p.empty),
            ]
            + [f"{p.shares.get(name, 0.0):.2f}" for name in report.unit_types]
        )
    return buffer.getvalue()


@dataclass(frozen=True)
class EpisodeTask:
    mode: AgentMode
    difficulty: int
    seed: int


def plan_episodes(config: EvalConfig) -> List[EpisodeTask]:
    return [
        EpisodeTask(mode, difficulty, config.base_seed + index)
        for mode in config.modes
        for difficulty in config.difficulties
        for index in range(config.episodes)
    ]


def _run_task(
    config: EvalConfig, task: EpisodeTask, spec: Optional[MachineSpec] = None
) -> Tuple[MatchResult, List[DecisionStepTrace]]:
    catalog = get_catalog(config.catalog_path)
    if spec is None:
        spec = load_spec(config.spec_path, catalog)
    cfg = AgentConfig(
        mode=task.mode,
        spec=spec,
        backend=config.backend,
        decision_period=config.decision_period,
        retry_budget=config.retry_budget,
    )
    episode = run_agent_episode(
        cfg,
        task.seed,
        build_opponent_script(task.difficulty, catalog),
        config.tick_limit,
        catalog,
    )
    return episode.result, episode.traces


def _run_task_in_worker(
    args: Tuple[EvalConfig, EpisodeTask]
) -> Tuple[MatchResult, List[DecisionStepTrace]]:
    config, task = args
    return _run_task(config, task)


def run_eval(config: EvalConfig) -> EvalReport:
    """
    Run the full matrix and write report.csv, results.jsonl and one trace per
    episode under config.out_dir. The backend is health-checked before any episode.
    """
    catalog = get_catalog(config.catalog_path)
    spec = load_spec(config.spec_path, catalog)
    checked = build_backend(config.backend, spec, catalog)
    try:
        status = health_check(checked)
    finally:
        close_backend(checked)
    if status is not HealthStatus.OK:
        raise BackendConfigError(f"{config.backend.kind.value} backend is {status.value}")

    tasks = plan_episodes(config)
    logger.info("eval: %d episodes on %d worker(s)", len(tasks), config.workers)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(_run_task_in_worker, [(config, task) for task in tasks]))
    else:
        outputs = [_run_task(config, task, spec) for task in tasks]

    outputs.sort(key=lambda item: (item[0].mode.value, item[0].difficulty, item[0].seed))
    results = [result for result, _ in outputs]
    report = build_report(results, catalog)
    for row in report.rows:
        logger.info(
            "cell %s d%d: win rate %.2f over %d episodes",
            row.mode.value, row.difficulty, row.win_rate, row.episodes,
        )

    if config.out_dir:
        write_artifacts(Path(config.out_dir), report, outputs)
    return report


def write_artifacts(
    out_dir: Path,
    report: EvalReport,
    outputs: Iterable[Tuple[MatchResult, List[DecisionStepTrace]]],
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.csv").write_text(report_csv(report), encoding="utf-8", newline="\n")
    outputs = list(outputs)
    write_jsonl(out_dir / "results.jsonl", [result.model_dump_json() for result, _ in outputs])
    for result, traces in outputs:
        name = f"{result.mode.value}_d{result.difficulty}_s{result.seed}.jsonl"
        write_trace(traces, out_dir / "traces" / name)


def replay_report(traces: Sequence[DecisionStepTrace]) -> List[str]:
    """Human-readable state changes, holds and flags of one episode trace."""
    lines: List[str] = []
    previous: Optional[str] = None
    for trace in traces:
        if trace.failure:
            lines.append(f"tick {trace.timestep}: hold ({trace.failure})")
        for flag in trace.flags:
            lines.append(f"tick {trace.timestep}: flag {flag}")
        state = trace.state
        if state is None or state == previous:
            continue
        if previous is None:
            lines.append(f"tick {trace.timestep}: start <{state}>")
        else:
            lines.append(f"tick {trace.timestep}: <{previous}> -> <{state}>")
        previous = state
    return lines


def count_transitions(traces: Sequence[DecisionStepTrace]) -> int:
    """State changes between consecutive decisions; the memoryless baseline oscillates more."""
    states = [t.state for t in traces if t.state is not None]
    return sum(1 for a, b in zip(states, states[1:]) if a != b)
