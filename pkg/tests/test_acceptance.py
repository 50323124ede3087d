"""Acceptance gate: one test per shipping criterion.

Each test prints exactly one PASS/FAIL line to the terminal, so a full
run reads as a checklist.  Tolerances are zero throughout: every count
is asserted exactly.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from contextlib import contextmanager, redirect_stdout
from io import StringIO

import pytest

from frameground.cli import main as cli_main
from frameground.competency import CompetencyEnvironment
from frameground.interpreter import (
    Complete,
    DefinitionAnswer,
    Suspended,
    combinations,
    complete,
    interpret,
    resume,
)
from frameground.kbio import load_knowledge_base, validate_knowledge_base
from frameground.parsing import parse_utterance
from frameground.session import (
    AmbiguityDetected,
    InquiryRequested,
    NoActionPossible,
    ParseFailed,
    PlanExecuted,
    PlansReady,
    Policy,
    close_session,
    open_session,
    submit_utterance,
)

from helpers import (
    CORRUPTIONS,
    JACOB_KB,
    MOTORS_KB,
    SCENARIOS,
    corrupt_kb,
    lexicon_case,
    resume_case,
)


@contextmanager
def criterion(capsys, name: str):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"FAIL {name}")
        raise
    else:
        with capsys.disabled():
            print(f"PASS {name}")


def test_scenario_1_single_plan_with_funnel(capsys):
    with criterion(capsys, "scenario-1-funnel-96-1-1-1"):
        started = time.perf_counter()
        session = open_session(JACOB_KB)
        submit_utterance(session, "Jacob find the blue ball")
        elapsed = time.perf_counter() - started

        ready, executed = session.events
        assert isinstance(ready, PlansReady)
        assert isinstance(executed, PlanExecuted)
        assert len(ready.plans) == 1
        assert ready.plans[0].strategy == "es:colored-ball-search"

        trace = session.last_trace
        ball_arg = trace.arguments[1]
        assert ball_arg.text == "the blue ball"
        assert ball_arg.raw_pairs == 96
        assert trace.combination_count == 1
        assert trace.meaning_count == 1
        assert trace.plan_count == 1
        rejected = [v for v in trace.validations if not v.valid]
        assert len(rejected) == 1
        assert rejected[0].strategy == "es:person-search"
        assert rejected[0].failed_kind == "is_a"
        assert rejected[0].failed_target == "n:person"

        assert elapsed < 1.0
        close_session(session)


def test_scenario_2_ambiguity_under_both_policies(capsys):
    with criterion(capsys, "scenario-2-two-plans-both-policies"):
        asking = open_session(MOTORS_KB, policy=Policy.ASK_USER)
        event = submit_utterance(asking, "Jacob start motor nine")
        assert isinstance(event, AmbiguityDetected)
        assert len(event.plans) == 2
        assert asking.events == [event]
        close_session(asking)

        auto = open_session(MOTORS_KB, policy=Policy.AUTO_FIRST)
        submit_utterance(auto, "Jacob start motor nine")
        ready, executed = auto.events
        assert isinstance(ready, PlansReady) and len(ready.plans) == 2
        assert isinstance(executed, PlanExecuted)
        assert executed.trace.plan == ready.plans[0].plan
        assert executed.trace.entries[0].competency == "c:internal-motor-control"
        close_session(auto)


def test_combination_counts_match_brute_force(capsys, tmp_path):
    with criterion(capsys, "combination-law-200-random-kbs"):
        for seed in range(200):
            rng = random.Random(seed)
            kb = tmp_path / f"kb{seed}"
            utterance, expected = lexicon_case(rng, kb)
            store = load_knowledge_base(kb)
            tree = parse_utterance(utterance, "en", {"v"})
            combos = complete(combinations(tree, "en", store))
            actual = [tuple(s for _, s in c.arg_senses) for c in combos]
            wanted = list(itertools.product(*expected))
            assert len(actual) == len(wanted), f"seed {seed}"
            assert actual == wanted, f"seed {seed}"


def test_resume_equals_interpretation_over_augmented_memory(capsys, tmp_path):
    with criterion(capsys, "resume-equivalence-50-random-cases"):
        for seed in range(50):
            rng = random.Random(1000 + seed)
            kb = tmp_path / f"kb{seed}"
            utterance, definition, expected_plans = resume_case(rng, kb)

            suspended_store = load_knowledge_base(kb)
            tree = parse_utterance(
                utterance, "en", suspended_store.verb_lemmas("en")
            )
            outcome = interpret(
                tree, "en", suspended_store,
                CompetencyEnvironment.from_store(suspended_store),
            )
            assert isinstance(outcome, Suspended), f"seed {seed}"
            resumed = resume(outcome.handle, DefinitionAnswer(definition))
            assert isinstance(resumed, Complete), f"seed {seed}"

            augmented_store = load_knowledge_base(kb)
            augmented_store.mutator.add_concept_definition(definition)
            direct = interpret(
                tree, "en", augmented_store,
                CompetencyEnvironment.from_store(augmented_store),
            )
            assert isinstance(direct, Complete), f"seed {seed}"

            assert resumed.plans == direct.plans, f"seed {seed}"
            assert len(resumed.plans) == expected_plans, f"seed {seed}"


def test_empty_failure_and_inquiry_are_distinct_events(capsys):
    with criterion(capsys, "event-distinction-no-action-vs-parse-vs-inquiry"):
        grounded = open_session(JACOB_KB)
        nothing = submit_utterance(grounded, "Jacob find the color")
        assert isinstance(nothing, NoActionPossible)
        close_session(grounded)

        malformed = open_session(JACOB_KB)
        failed = submit_utterance(malformed, "the blue ball")
        assert isinstance(failed, ParseFailed)
        close_session(malformed)

        missing = open_session(JACOB_KB)
        inquiry = submit_utterance(missing, "Jacob find the red cube")
        assert isinstance(inquiry, InquiryRequested)
        close_session(missing)

        assert len({type(nothing), type(failed), type(inquiry)}) == 3


def _run_transcript(transcript, kb) -> bytes:
    buffer = StringIO()
    with redirect_stdout(buffer):
        code = cli_main([
            "run", str(transcript), "--kb", str(kb), "--emit-events",
        ])
    assert code == 0
    return buffer.getvalue().encode("utf-8")


def test_repeated_runs_are_byte_identical(capsys):
    with criterion(capsys, "determinism-10-runs-byte-identical"):
        for transcript, kb in (
            (SCENARIOS / "jacob.txt", JACOB_KB),
            (SCENARIOS / "motors.txt", MOTORS_KB),
        ):
            outputs = {_run_transcript(transcript, kb) for _ in range(10)}
            assert len(outputs) == 1, transcript.name
            log = json.loads(
                outputs.pop().decode("utf-8").strip().splitlines()[-1]
            )
            assert log, transcript.name


def test_validation_flags_every_seeded_corruption(capsys, tmp_path):
    with criterion(capsys, "kb-validation-12-corruptions-flagged"):
        assert len(CORRUPTIONS) == 12
        flagged = 0
        for name in CORRUPTIONS:
            kb = corrupt_kb(JACOB_KB, tmp_path / name, name)
            errors = [
                f for f in validate_knowledge_base(kb)
                if f.severity == "error"
            ]
            buffer = StringIO()
            with redirect_stdout(buffer):
                exit_code = cli_main(["validate", str(kb)])
            assert exit_code == 2, name
            assert errors, name
            flagged += 1
        assert flagged == 12


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
