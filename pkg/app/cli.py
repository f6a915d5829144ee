"""
Command line entry point: ``python -m app.cli {run,eval,replay,check-spec}``.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from app.config import Settings, get_settings
from app.models.agent import AgentConfig, AgentMode
from app.models.backend import BackendKind
from app.models.evaluation import EvalConfig
from app.services.catalog import get_catalog
from app.services.evaluation import count_transitions, replay_report, report_csv, run_eval
from app.services.opponent import PassiveOpponent, build_opponent_script
from app.services.orchestrator import read_trace, run_agent_episode, write_tick_records, write_trace
from app.services.scenarios import (
    REINFORCEMENT_DECISION_PERIOD,
    REINFORCEMENT_TICK_LIMIT,
    reinforcement_scenario,
)
from app.services.spec_parser import SpecParseError, load_spec

logger = logging.getLogger("app.cli")


def parse_difficulties(text: str) -> List[int]:
    """'1-7', '1,3,5' or a mix like '1-3,7'."""
    levels: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            low, high = (int(x) for x in part.split("-", 1))
            levels.extend(range(low, high + 1))
        elif part:
            levels.append(int(part))
    if not levels or any(not 1 <= level <= 7 for level in levels):
        raise argparse.ArgumentTypeError(f"difficulties must lie in 1..7: {text!r}")
    return sorted(set(levels))


def _settings(args: argparse.Namespace) -> Settings:
    config_path = getattr(args, "config", None)
    settings = Settings.from_env(config_path) if config_path else get_settings()
    overrides: Dict[str, Any] = {}
    for option, field_name in (
        ("backend", "backend_kind"),
        ("spec", "spec_path"),
        ("transcript", "transcript_path"),
        ("tick_limit", "tick_limit"),
        ("workers", "workers"),
    ):
        value = getattr(args, option, None)
        if value is not None:
            overrides[field_name] = BackendKind(value) if option == "backend" else value
    return settings.model_copy(update=overrides)


def cmd_run(args: argparse.Namespace) -> int:
    settings = _settings(args)
    catalog = get_catalog(settings.catalog_path)
    spec = load_spec(settings.spec_path, catalog)
    decision_period = settings.decision_period
    tick_limit = settings.tick_limit
    world = None
    opponent: Any = build_opponent_script(args.difficulty, catalog)
    if args.scenario == "reinforcement":
        world = reinforcement_scenario(catalog, args.seed)
        opponent = PassiveOpponent()
        decision_period = REINFORCEMENT_DECISION_PERIOD
        tick_limit = args.tick_limit or REINFORCEMENT_TICK_LIMIT

    cfg = AgentConfig(
        mode=AgentMode(args.mode),
        spec=spec,
        backend=settings.backend_descriptor(),
        decision_period=decision_period,
        retry_budget=settings.retry_budget,
        max_tokens=settings.max_tokens,
        temperature=settings.temperature,
    )
    episode = run_agent_episode(
        cfg,
        args.seed,
        opponent,
        tick_limit,
        catalog,
        world=world,
        record_ticks=bool(args.tick_trace_out),
    )
    if args.trace_out:
        write_trace(episode.traces, args.trace_out)
    if args.tick_trace_out:
        write_tick_records(episode.tick_records, args.tick_trace_out)

    print(episode.result.model_dump_json(indent=2))
    for line in replay_report(episode.traces):
        print(line)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    settings = _settings(args)
    config = EvalConfig(
        modes=[AgentMode(m) for m in args.modes],
        difficulties=args.difficulties,
        episodes=args.episodes,
        base_seed=args.seed,
        tick_limit=settings.tick_limit,
        decision_period=settings.decision_period,
        retry_budget=settings.retry_budget,
        backend=settings.backend_descriptor(),
        spec_path=settings.spec_path,
        catalog_path=settings.catalog_path,
        out_dir=args.out_dir,
        workers=settings.workers,
    )
    report = run_eval(config)
    sys.stdout.write(report_csv(report))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    traces = read_trace(args.trace)
    for line in replay_report(traces):
        print(line)
    print(f"decisions: {len(traces)}, state changes: {count_transitions(traces)}")
    return 0


def cmd_check_spec(args: argparse.Namespace) -> int:
    settings = _settings(args)
    spec = load_spec(args.path, get_catalog(settings.catalog_path))
    summary = {
        "states": list(spec.states),
        "initial_state": spec.initial_state,
        "transitions": len(spec.transitions),
        "rules": len(spec.rules),
        "variables": list(spec.variable_names),
    }
    print(json.dumps(summary, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="masmp", description="State-machine prompted RTS agent")
    parser.add_argument("--config", help="JSON config file (same as MASMP_CONFIG)")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--spec", help="Spec DSL file")
        p.add_argument("--backend", choices=[k.value for k in BackendKind])
        p.add_argument("--transcript", help="Transcript for the scripted backend")
        p.add_argument("--tick-limit", type=int)
        p.add_argument("--seed", type=int, default=0)

    run = sub.add_parser("run", help="Play one episode")
    common(run)
    run.add_argument("--mode", choices=[m.value for m in AgentMode], default=AgentMode.MASMP.value)
    run.add_argument("--difficulty", type=int, choices=range(1, 8), default=1)
    run.add_argument("--scenario", choices=["reinforcement"], help="Start from a scripted world")
    run.add_argument("--trace-out", help="Decision trace JSON Lines file")
    run.add_argument("--tick-trace-out", help="Per-tick simulator trace JSON Lines file")
    run.set_defaults(handler=cmd_run)

    evaluate = sub.add_parser("eval", help="Run the evaluation matrix")
    common(evaluate)
    evaluate.add_argument("--episodes", type=int, default=5)
    evaluate.add_argument("--difficulties", type=parse_difficulties, default=list(range(1, 8)))
    evaluate.add_argument(
        "--modes",
        nargs="+",
        choices=[m.value for m in AgentMode],
        default=[AgentMode.MASMP.value, AgentMode.BASELINE.value],
    )
    evaluate.add_argument("--out-dir")
    evaluate.add_argument("--workers", type=int)
    evaluate.set_defaults(handler=cmd_eval)

    replay = sub.add_parser("replay", help="Render a decision trace as a transition report")
    replay.add_argument("trace")
    replay.set_defaults(handler=cmd_replay)

    check = sub.add_parser("check-spec", help="Parse and validate a spec file")
    check.add_argument("path")
    check.set_defaults(handler=cmd_check_spec)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = args.log_level or os.getenv("MASMP_LOG_LEVEL", "INFO")
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except SpecParseError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
