from __future__ import annotations

import json
import subprocess
import sys

from frameground.cli import main as cli_main

from helpers import JACOB_KB, MOTORS_KB, SCENARIOS, corrupt_kb


def run_cli(*argv):
    return cli_main([str(a) for a in argv])


def test_bundled_scenarios_pass(capsys):
    assert run_cli("run", SCENARIOS / "jacob.txt", "--kb", JACOB_KB) == 0
    assert run_cli("run", SCENARIOS / "motors.txt", "--kb", MOTORS_KB) == 0
    out = capsys.readouterr().out
    assert "1 plan(s) ready" in out
    assert "ambiguous: 2 plans" in out


def test_expect_mismatch_exits_3(tmp_path, capsys):
    transcript = tmp_path / "t.txt"
    transcript.write_text("say Jacob find the blue ball\nexpect ambiguity\n")
    assert run_cli("run", transcript, "--kb", JACOB_KB) == 3
    err = capsys.readouterr().err
    assert "expected 'ambiguity'" in err
    assert "plans_ready" in err


def test_expect_count_mismatch_exits_3(tmp_path, capsys):
    transcript = tmp_path / "t.txt"
    transcript.write_text("say Jacob start motor nine\nexpect ambiguity 3\n")
    assert run_cli("run", transcript, "--kb", MOTORS_KB) == 3
    assert "expected 3 plan(s), got 2" in capsys.readouterr().err


def test_unknown_directive_exits_4(tmp_path, capsys):
    transcript = tmp_path / "t.txt"
    transcript.write_text("shout loudly\n")
    assert run_cli("run", transcript, "--kb", JACOB_KB) == 4
    transcript.write_text("answer with feeling\n")
    assert run_cli("run", transcript, "--kb", JACOB_KB) == 4
    capsys.readouterr()


def test_missing_kb_exits_2(tmp_path, capsys):
    transcript = tmp_path / "t.txt"
    transcript.write_text("say hello\n")
    assert run_cli("run", transcript, "--kb", tmp_path / "absent") == 2
    assert "cannot load knowledge base" in capsys.readouterr().err


def test_session_errors_become_expectable_events(tmp_path, capsys):
    transcript = tmp_path / "t.txt"
    transcript.write_text(
        "say Jacob find the red cube\n"
        "expect inquiry\n"
        "say Jacob find the blue ball\n"
        "expect error\n"
        "answer sense s:en:ball.1\n"
        "expect plans 1\n"
        "expect executed\n"
    )
    assert run_cli("run", transcript, "--kb", JACOB_KB) == 0
    capsys.readouterr()


def test_definition_answer_and_comments(tmp_path, capsys):
    transcript = tmp_path / "t.txt"
    transcript.write_text(
        "# teach the missing word, then expect the plan\n"
        "say Jacob find the red cube\n"
        "expect inquiry\n"
        "answer define cube as n:physical-object with color n:red\n"
        "expect plans 1\n"
        "expect executed\n"
    )
    assert run_cli("run", transcript, "--kb", JACOB_KB) == 0
    assert "n:cmp:n:def:cube+n:red" in capsys.readouterr().out


def test_auto_policy_transcript(tmp_path, capsys):
    transcript = tmp_path / "t.txt"
    transcript.write_text(
        "say Jacob start motor nine\nexpect plans 2\nexpect executed\n"
    )
    assert run_cli("run", transcript, "--kb", MOTORS_KB,
                   "--policy", "auto") == 0
    capsys.readouterr()


def test_emit_events_prints_canonical_log(capsys):
    assert run_cli("run", SCENARIOS / "motors.txt", "--kb", MOTORS_KB,
                   "--emit-events") == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    log = json.loads(last)
    assert [e["type"] for e in log] == ["ambiguity", "executed"]
    assert last == json.dumps(
        log, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    )


def test_trace_flag_dumps_funnel(capsys):
    assert run_cli("run", SCENARIOS / "jacob.txt", "--kb", JACOB_KB,
                   "--trace") == 0
    out = capsys.readouterr().out
    assert '"funnel"' in out
    assert '"raw_pairs": 96' in out


def test_validate_healthy_kb(capsys):
    assert run_cli("validate", JACOB_KB) == 0
    assert "0 error(s), 0 warning(s)" in capsys.readouterr().out


def test_validate_corrupted_kb(tmp_path, capsys):
    kb = corrupt_kb(JACOB_KB, tmp_path / "kb", "typification-cycle")
    assert run_cli("validate", kb) == 2
    out = capsys.readouterr().out
    assert "cycle-typification" in out
    assert "1 error(s)" in out


def test_repl_over_piped_stdin():
    script = (
        "Jacob find the blue ball\n"
        "trace\n"
        "Jacob find the red cube\n"
        "answer sense s:en:ball.1\n"
        "quit\n"
    )
    proc = subprocess.run(
        [sys.executable, "-m", "frameground.cli", "repl",
         "--kb", str(JACOB_KB)],
        input=script, capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert "1 plan(s) ready" in proc.stdout
    assert '"funnel"' in proc.stdout
    assert "unknown argument: 'the red cube'" in proc.stdout
    assert proc.stdout.count("executed plan:") == 2
