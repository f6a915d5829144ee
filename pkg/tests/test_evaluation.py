import csv
import io

import pytest

from app.config import DEFAULT_CATALOG_PATH, DEFAULT_SPEC_PATH
from app.models.agent import AgentConfig, AgentMode, DecisionStepTrace
from app.models.backend import BackendDescriptor, BackendKind, HealthStatus
from app.models.evaluation import EvalConfig, MatchOutcome, MatchResult
from app.services.backends import BackendConfigError
from app.services.evaluation import (
    REPORT_COLUMNS,
    EmptyResultsError,
    build_report,
    count_transitions,
    plan_episodes,
    production_metrics,
    replay_report,
    report_csv,
    run_eval,
    win_rate,
)
from app.services.opponent import build_opponent_script
from app.services.orchestrator import read_trace, run_agent_episode

ORACLE = BackendDescriptor(kind=BackendKind.ORACLE, spec_path=DEFAULT_SPEC_PATH)


def result(outcome=MatchOutcome.WIN, early=None, mode=AgentMode.MASMP, difficulty=1, seed=0):
    return MatchResult(
        outcome=outcome,
        final_tick=100,
        seed=seed,
        difficulty=difficulty,
        mode=mode,
        early_production=early or {},
        cutoff_tick=420,
    )


def outcomes(wins, total):
    return [result(MatchOutcome.WIN if i < wins else MatchOutcome.LOSS) for i in range(total)]


@pytest.mark.parametrize(
    "wins, expected",
    [(3, 60.0), (4, 80.0), (0, 0.0), (5, 100.0)],
)
def test_win_rate(wins, expected):
    assert win_rate(outcomes(wins, 5)) == expected


def test_draws_only_count_in_the_denominator():
    results = [result(MatchOutcome.WIN), result(MatchOutcome.DRAW), result(MatchOutcome.DRAW)]
    assert win_rate(results) == pytest.approx(33.333333, abs=1e-5)


def test_empty_results():
    with pytest.raises(EmptyResultsError):
        win_rate([])
    with pytest.raises(EmptyResultsError):
        production_metrics([], None)


def test_single_episode_production_share(catalog):
    metrics = production_metrics([result(early={"stalker": 4, "zealot": 6})], catalog)
    assert metrics.advanced_ratio == 40.0
    assert metrics.mean_advanced == 4.0
    assert metrics.mean_total == 10.0
    assert metrics.shares == {"zealot": 60.0, "adept": 0.0, "stalker": 40.0, "immortal": 0.0}


def test_production_over_one_hundred_episodes(catalog):
    results = [
        result(early={"stalker": 19 if i < 32 else 18, "zealot": 28 if i < 25 else 27})
        for i in range(100)
    ]
    metrics = production_metrics(results, catalog)
    assert f"{metrics.advanced_ratio:.2f}" == "40.20"
    assert metrics.mean_advanced == pytest.approx(18.32)
    assert metrics.mean_total == pytest.approx(45.57)


def test_production_over_fifty_episodes(catalog):
    results = [
        result(early={"immortal": 9 if i < 20 else 8, "adept": 35 if i < 23 else 34})
        for i in range(50)
    ]
    metrics = production_metrics(results, catalog)
    assert f"{metrics.advanced_ratio:.2f}" == "19.60"
    assert metrics.mean_advanced == pytest.approx(8.4)
    assert metrics.mean_total == pytest.approx(42.86)


def test_workers_and_structures_are_not_counted(catalog):
    metrics = production_metrics(
        [result(early={"probe": 10, "cybernetics_core": 1, "stalker": 1})], catalog
    )
    assert metrics.mean_total == 1.0
    assert metrics.advanced_ratio == 100.0


def test_nothing_produced_is_flagged(catalog):
    metrics = production_metrics([result(early={"probe": 3})], catalog)
    assert metrics.empty
    assert metrics.advanced_ratio == 0.0


def test_report_csv(catalog):
    results = outcomes(3, 5) + [
        result(MatchOutcome.DRAW, {"zealot": 2}, AgentMode.BASELINE, difficulty=2)
    ]
    text = report_csv(build_report(results, catalog))
    rows = list(csv.reader(io.StringIO(text)))

    assert rows[0] == REPORT_COLUMNS + [
        "share_zealot",
        "share_adept",
        "share_stalker",
        "share_immortal",
    ]
    assert rows[1] == [
        "baseline", "2", "1", "0", "1", "0", "0.00", "0.00", "2.00", "0.00", "0",
        "100.00", "0.00", "0.00", "0.00",
    ]
    assert rows[2][:7] == ["masmp", "1", "5", "3", "0", "2", "60.00"]
    assert rows[2][10] == "1"
    assert text.endswith("\n") and "\r" not in text


def test_plan_episodes_seeds():
    config = EvalConfig(
        modes=[AgentMode.MASMP], difficulties=[1, 2], episodes=3, base_seed=10,
        backend=ORACLE, spec_path=DEFAULT_SPEC_PATH,
    )
    tasks = plan_episodes(config)
    assert len(tasks) == 6
    assert [t.seed for t in tasks if t.difficulty == 2] == [10, 11, 12]


def trace(t, state, failure=None, flags=()):
    return DecisionStepTrace(
        timestep=t,
        mode=AgentMode.MASMP,
        prompt_sha256="0" * 64,
        state=state,
        failure=failure,
        flags=list(flags),
    )


def test_replay_report():
    traces = [
        trace(0, "opening"),
        trace(8, "defensive"),
        trace(16, "defensive", failure="transport: timeout"),
        trace(24, "aggressive", flags=["extra_strategy_blocks"]),
        trace(32, "aggressive"),
    ]
    assert replay_report(traces) == [
        "tick 0: start <opening>",
        "tick 8: <opening> -> <defensive>",
        "tick 16: hold (transport: timeout)",
        "tick 24: flag extra_strategy_blocks",
        "tick 24: <defensive> -> <aggressive>",
    ]
    assert count_transitions(traces) == 2


def test_run_eval_writes_artifacts(tmp_path):
    config = EvalConfig(
        modes=[AgentMode.MASMP, AgentMode.BASELINE],
        difficulties=[1],
        episodes=1,
        tick_limit=200,
        backend=ORACLE,
        spec_path=DEFAULT_SPEC_PATH,
        catalog_path=DEFAULT_CATALOG_PATH,
        out_dir=str(tmp_path),
    )
    report = run_eval(config)

    assert [(row.mode, row.difficulty) for row in report.rows] == [
        (AgentMode.BASELINE, 1),
        (AgentMode.MASMP, 1),
    ]
    assert (tmp_path / "report.csv").read_text() == report_csv(report)
    lines = (tmp_path / "results.jsonl").read_text().splitlines()
    results = [MatchResult.model_validate_json(line) for line in lines]
    assert [r.mode for r in results] == [AgentMode.BASELINE, AgentMode.MASMP]
    # one decision every 8 ticks until the episode ends, by a win or the tick limit
    final_tick = results[1].final_tick
    assert final_tick <= 200
    traces = read_trace(tmp_path / "traces" / "masmp_d1_s0.jsonl")
    assert [t.timestep for t in traces] == list(range(0, final_tick, 8))
    assert (tmp_path / "traces" / "baseline_d1_s0.jsonl").is_file()


def test_run_eval_refuses_unhealthy_backend(tmp_path):
    config = EvalConfig(
        backend=BackendDescriptor(
            kind=BackendKind.SCRIPTED, transcript_path=str(tmp_path / "missing.jsonl")
        ),
        spec_path=DEFAULT_SPEC_PATH,
        out_dir=str(tmp_path / "out"),
    )
    with pytest.raises(BackendConfigError):
        run_eval(config)
    assert not (tmp_path / "out").exists()


class IdleBackend:
    kind = BackendKind.SCRIPTED

    def generate(self, request):
        return "Reasoning: wait.\n\nAction: NoOp()\n"

    def health(self):
        return HealthStatus.OK


@pytest.mark.slow
def test_stronger_opponents_win_faster(catalog, default_spec):
    cfg = AgentConfig(mode=AgentMode.BASELINE, spec=default_spec, backend=ORACLE)
    final_ticks = []
    for difficulty in (1, 4, 7):
        episode = run_agent_episode(
            cfg, 0, build_opponent_script(difficulty, catalog), 2000, catalog, IdleBackend()
        )
        assert episode.result.outcome is MatchOutcome.LOSS
        final_ticks.append(episode.result.final_tick)
    assert final_ticks == sorted(final_ticks, reverse=True)


@pytest.mark.slow
def test_full_matrix(tmp_path):
    config = EvalConfig(
        episodes=5,
        backend=ORACLE,
        spec_path=DEFAULT_SPEC_PATH,
        catalog_path=DEFAULT_CATALOG_PATH,
        out_dir=str(tmp_path),
        workers=2,
    )
    report = run_eval(config)
    assert len(report.rows) == 14
    assert all(row.episodes == 5 for row in report.rows)
    assert len(list((tmp_path / "traces").iterdir())) == 70


def test_rerun_is_byte_identical(tmp_path):
    def run(out):
        config = EvalConfig(
            difficulties=[1, 7],
            episodes=2,
            tick_limit=300,
            backend=ORACLE,
            spec_path=DEFAULT_SPEC_PATH,
            catalog_path=DEFAULT_CATALOG_PATH,
            out_dir=str(out),
        )
        run_eval(config)
        return (out / "report.csv").read_bytes(), (out / "results.jsonl").read_bytes()

    assert run(tmp_path / "first") == run(tmp_path / "second")


@pytest.mark.slow
def test_win_rate_by_difficulty_and_mode(tmp_path):
    """Oracle agent, 8 seeds per cell: harder opponents never raise the win rate, memory never lowers it."""
    config = EvalConfig(
        episodes=8,
        backend=ORACLE,
        spec_path=DEFAULT_SPEC_PATH,
        catalog_path=DEFAULT_CATALOG_PATH,
        out_dir=str(tmp_path),
        workers=2,
    )
    report = run_eval(config)
    rates = {(row.mode, row.difficulty): row.win_rate for row in report.rows}

    for mode in (AgentMode.MASMP, AgentMode.BASELINE):
        by_difficulty = [rates[(mode, d)] for d in range(1, 8)]
        assert by_difficulty == sorted(by_difficulty, reverse=True)
    for difficulty in range(1, 8):
        assert rates[(AgentMode.MASMP, difficulty)] >= rates[(AgentMode.BASELINE, difficulty)]
