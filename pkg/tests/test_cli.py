import argparse
import json
import os

import pytest

from app import cli
from app.config import DEFAULT_SPEC_PATH


def test_parse_difficulties():
    assert cli.parse_difficulties("1-3,7") == [1, 2, 3, 7]
    assert cli.parse_difficulties("5, 5,2") == [2, 5]
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_difficulties("0-2")
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_difficulties("")


def test_check_spec_ok(capsys):
    assert cli.main(["check-spec", DEFAULT_SPEC_PATH]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["states"] == ["opening", "defensive", "aggressive"]
    assert summary["rules"] == 3


def test_check_spec_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.masmp"
    path.write_text('STATES\ncalm\nTRANSITIONS\ncalm -> rush : 1 : tick > 1 : "go"\n')
    assert cli.main(["check-spec", str(path)]) == 1
    assert "line 4, column 9: unknown state 'rush'" in capsys.readouterr().err


def test_check_spec_missing_file(tmp_path, capsys):
    assert cli.main(["check-spec", str(tmp_path / "nope.masmp")]) == 1
    assert "cannot read spec" in capsys.readouterr().err


def test_run_reinforcement_scenario(tmp_path, capsys):
    trace_path = tmp_path / "trace.jsonl"
    ticks_path = tmp_path / "ticks.jsonl"
    code = cli.main(
        [
            "run",
            "--scenario", "reinforcement",
            "--tick-limit", "32",
            "--trace-out", str(trace_path),
            "--tick-trace-out", str(ticks_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "tick 8: <defensive> -> <aggressive>" in out
    assert "tick 24: <aggressive> -> <defensive>" in out
    assert len(trace_path.read_text().splitlines()) == 4
    first_tick = json.loads(ticks_path.read_text().splitlines()[0])
    assert first_tick["tick"] == 0 and first_tick["acting_player"] == "A"

    assert cli.main(["replay", str(trace_path)]) == 0
    assert "decisions: 4, state changes: 2" in capsys.readouterr().out


def test_run_scenario_with_shorter_tick_limit(tmp_path, capsys):
    trace_path = tmp_path / "trace.jsonl"
    code = cli.main(
        [
            "run",
            "--scenario", "reinforcement",
            "--tick-limit", "16",
            "--trace-out", str(trace_path),
        ]
    )
    assert code == 0
    assert '"final_tick": 16' in capsys.readouterr().out
    assert len(trace_path.read_text().splitlines()) == 2


def test_eval_small_matrix(tmp_path, capsys):
    code = cli.main(
        [
            "eval",
            "--episodes", "1",
            "--difficulties", "1",
            "--modes", "masmp",
            "--tick-limit", "100",
            "--out-dir", str(tmp_path),
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("mode,difficulty,episodes,wins")
    assert lines[1].startswith("masmp,1,1,0,1,0,0.00")
    assert (tmp_path / "report.csv").is_file()


def test_scripted_backend_without_transcript_fails(capsys):
    assert cli.main(["run", "--backend", "scripted"]) == 1
    assert "error:" in capsys.readouterr().err


def test_config_flag(tmp_path, capsys):
    path = tmp_path / "masmp.json"
    path.write_text(json.dumps({"spec_path": str(tmp_path / "missing.masmp")}))
    assert cli.main(["--config", str(path), "run", "--tick-limit", "8"]) == 1
    assert "cannot read spec" in capsys.readouterr().err
    assert "MASMP_CONFIG" not in os.environ

    # without the flag the default spec is back
    assert cli.main(["run", "--tick-limit", "8"]) == 0
