"""Command-line front end.

Subcommands: repl (interactive dialogue), run (batch transcript with
expectations), validate (KB integrity sweep), serve (TCP gateway).

Exit codes: 0 success, 2 knowledge base error, 3 expectation mismatch,
4 protocol error (malformed transcript or command line usage).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .gateway import GatewayConfig, GatewayServer
from .interpreter import DefinitionAnswer, InquiryAnswer, SenseAnswer
from .kbio import KBError, load_knowledge_base, validate_knowledge_base
from .model import ConceptDefinition, ORelation
from .session import (
    AmbiguityDetected,
    IndexOutOfRange,
    InquiryRequested,
    NoActionPossible,
    NoPendingChoice,
    NoPendingInquiry,
    ParseFailed,
    PlanExecuted,
    PlansReady,
    Policy,
    Session,
    SessionBusy,
    answer_inquiry,
    choose_plan,
    close_session,
    event_to_dict,
    open_session,
    submit_utterance,
)

EXIT_OK = 0
EXIT_KB_ERROR = 2
EXIT_EXPECT_MISMATCH = 3
EXIT_PROTOCOL_ERROR = 4

_EXPECT_KINDS = {
    "plans": "plans_ready",
    "inquiry": "inquiry",
    "ambiguity": "ambiguity",
    "no_action": "no_action",
    "parse_failed": "parse_failed",
    "executed": "executed",
    "error": "error",
}

_POLICIES = {"ask": Policy.ASK_USER, "auto": Policy.AUTO_FIRST}


def _render(event) -> List[str]:
    if isinstance(event, PlansReady):
        lines = [f"{len(event.plans)} plan(s) ready:"]
        lines += _plan_lines(event.plans)
        return lines
    if isinstance(event, AmbiguityDetected):
        lines = [f"ambiguous: {len(event.plans)} plans possible, "
                 "pick one with choose <n>"]
        lines += _plan_lines(event.plans)
        return lines
    if isinstance(event, InquiryRequested):
        lines = [f"unknown argument: {event.inquiry.argument_text!r}"]
        if event.diagnostics:
            lines.append(f"  (previous answer rejected: {event.diagnostics})")
        for sense in event.inquiry.candidate_definitions:
            lines.append(f"  maybe: {sense.id} — {sense.gloss}")
        lines.append(
            "  answer with: sense <id>  |  define <lemma> as <concept id>"
            " [with <relation> <concept id>]"
        )
        return lines
    if isinstance(event, NoActionPossible):
        return ["understood, but no action can be taken"]
    if isinstance(event, ParseFailed):
        return [f"cannot parse: {event.reason}"]
    if isinstance(event, PlanExecuted):
        lines = [f"executed {event.trace.plan}:"]
        for entry in event.trace.entries:
            bound = ", ".join(f"{r}={n}" for r, n in entry.bindings)
            lines.append(
                f"  {entry.competency}.{entry.action}({bound}) -> {entry.result}"
            )
        return lines
    return [repr(event)]


def _plan_lines(summaries) -> List[str]:
    lines = []
    for i, summary in enumerate(summaries):
        bound = ", ".join(
            f"{role}={label}" for role, _node, label in summary.bindings
        )
        lines.append(f"  [{i}] {summary.strategy_name} ({bound})")
    return lines


def _parse_answer_text(rest: str, language: str) -> InquiryAnswer:
    parts = rest.split()
    if not parts:
        raise ValueError("empty answer")
    if parts[0] == "sense":
        if len(parts) != 2:
            raise ValueError("usage: sense <sense id>")
        return SenseAnswer(sense_id=parts[1])
    if parts[0] == "define":
        body = rest[len("define"):].strip()
        lemma, sep, tail = body.partition(" as ")
        if not sep or not lemma.strip():
            raise ValueError(
                "usage: define <lemma> as <concept id>"
                " [with <relation> <concept id>]..."
            )
        tokens = tail.split()
        if not tokens:
            raise ValueError("definition needs a concept id after 'as'")
        concept_type = tokens[0]
        relations = []
        i = 1
        while i < len(tokens):
            if tokens[i] != "with" or i + 3 > len(tokens):
                raise ValueError(
                    "definition relations are: with <relation> <concept id>"
                )
            relations.append(ORelation(kind=tokens[i + 1],
                                       target=tokens[i + 2]))
            i += 3
        return DefinitionAnswer(definition=ConceptDefinition(
            lemma=lemma.strip(),
            language=language,
            concept_type=concept_type,
            relations=tuple(relations),
        ))
    raise ValueError(f"unknown answer form {parts[0]!r}")


def _print_trace(session: Session) -> None:
    trace = session.last_trace
    if trace is None:
        print("no trace yet")
        return
    print(json.dumps(trace.to_dict(), indent=2, sort_keys=True))


def _open(args) -> Session:
    return open_session(
        args.kb,
        args.lang,
        _POLICIES[args.policy],
        no_exec=args.no_exec,
        lenient=args.lenient,
    )


def cmd_repl(args) -> int:
    try:
        session = _open(args)
    except (KBError, OSError) as exc:
        print(f"cannot load knowledge base: {exc}", file=sys.stderr)
        return EXIT_KB_ERROR
    print(f"knowledge base: {args.kb}  language: {args.lang}  "
          f"policy: {session.policy.value}")
    print("type an utterance; commands: answer …, choose <n>, trace, quit")
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            print()
            break
        if not line:
            continue
        word, _, rest = line.partition(" ")
        if word in ("quit", "exit"):
            break
        if word == "trace":
            _print_trace(session)
            continue
        before = len(session.events)
        try:
            if word == "answer":
                answer_inquiry(
                    session, _parse_answer_text(rest, session.language)
                )
            elif word == "choose":
                choose_plan(session, int(rest))
            else:
                submit_utterance(session, line)
        except (SessionBusy, NoPendingInquiry, NoPendingChoice,
                IndexOutOfRange, ValueError) as exc:
            print(f"error: {exc}")
            continue
        for event in session.events[before:]:
            for out in _render(event):
                print(out)
        if args.trace and word not in ("answer", "choose"):
            _print_trace(session)
    close_session(session, persist_kb=args.persist_kb)
    return EXIT_OK


def _match_expect(rest: str, events: List[dict], cursor: int,
                  line_no: int) -> Optional[str]:
    """None if the expectation matches events[cursor], else a message."""
    parts = rest.split()
    if not parts or parts[0] not in _EXPECT_KINDS:
        return (f"line {line_no}: unknown expectation {rest!r} "
                f"(one of {sorted(_EXPECT_KINDS)})")
    kind = _EXPECT_KINDS[parts[0]]
    want_count = None
    if len(parts) > 1:
        try:
            want_count = int(parts[1])
        except ValueError:
            return f"line {line_no}: bad count {parts[1]!r}"
    if cursor >= len(events):
        return (f"line {line_no}: expected {rest!r} but the previous "
                f"directive produced only {len(events)} event(s)")
    got = events[cursor]
    if got["type"] != kind:
        return (f"line {line_no}: expected {rest!r}, got {got['type']!r}"
                f" {json.dumps(got, sort_keys=True)[:200]}")
    if want_count is not None:
        actual = len(got.get("plans", []))
        if actual != want_count:
            return (f"line {line_no}: expected {want_count} plan(s), "
                    f"got {actual}")
    return None


def cmd_run(args) -> int:
    transcript = Path(args.transcript)
    if not transcript.is_file():
        print(f"no transcript at {transcript}", file=sys.stderr)
        return EXIT_PROTOCOL_ERROR
    try:
        session = _open(args)
    except (KBError, OSError) as exc:
        print(f"cannot load knowledge base: {exc}", file=sys.stderr)
        return EXIT_KB_ERROR
    current: List[dict] = []
    cursor = 0
    for line_no, raw in enumerate(
        transcript.read_text("utf-8").splitlines(), start=1
    ):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive, _, rest = line.partition(" ")
        rest = rest.strip()
        if directive == "expect":
            problem = _match_expect(rest, current, cursor, line_no)
            if problem is not None:
                print(problem, file=sys.stderr)
                return EXIT_EXPECT_MISMATCH
            cursor += 1
            continue
        before = len(session.events)
        try:
            if directive == "say":
                submit_utterance(session, rest)
            elif directive == "answer":
                answer_inquiry(
                    session, _parse_answer_text(rest, session.language)
                )
            elif directive == "choose":
                choose_plan(session, int(rest))
            else:
                print(f"line {line_no}: unknown directive {directive!r}",
                      file=sys.stderr)
                return EXIT_PROTOCOL_ERROR
        except (SessionBusy, NoPendingInquiry, NoPendingChoice,
                IndexOutOfRange) as exc:
            current = [{
                "type": "error",
                "error": type(exc).__name__,
                "message": str(exc),
            }]
            cursor = 0
            continue
        except ValueError as exc:
            print(f"line {line_no}: {exc}", file=sys.stderr)
            return EXIT_PROTOCOL_ERROR
        current = [event_to_dict(e) for e in session.events[before:]]
        cursor = 0
        for event in session.events[before:]:
            for out in _render(event):
                print(out)
        if args.trace and directive == "say":
            _print_trace(session)
    close_session(session, persist_kb=args.persist_kb)
    if args.emit_events:
        print(session.event_log_json())
    return EXIT_OK


def cmd_validate(args) -> int:
    findings = validate_knowledge_base(args.kb, lenient=args.lenient)
    for finding in findings:
        print(finding.format())
    errors = sum(1 for f in findings if f.severity == "error")
    warnings = len(findings) - errors
    print(f"{errors} error(s), {warnings} warning(s)")
    return EXIT_KB_ERROR if errors else EXIT_OK


def cmd_serve(args) -> int:
    config = GatewayConfig(
        kb_path=args.kb,
        language=args.lang,
        policy=_POLICIES[args.policy],
        heartbeat_interval=args.heartbeat,
        no_exec=args.no_exec,
        lenient=args.lenient,
    )
    try:
        load_knowledge_base(args.kb, lenient=args.lenient)
    except (KBError, OSError) as exc:
        print(f"cannot load knowledge base: {exc}", file=sys.stderr)
        return EXIT_KB_ERROR
    server = GatewayServer((args.host, args.port), config)
    host, port = server.server_address[:2]
    # bound address, not the requested one: --port 0 picks a free port
    print(f"listening on {host}:{port} (kb: {args.kb})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def _add_session_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kb", required=True, help="knowledge base directory")
    parser.add_argument("--lang", default="en", help="language tag")
    parser.add_argument("--policy", choices=sorted(_POLICIES), default="ask",
                        help="ambiguity policy: ask the user or take the "
                             "first plan")
    parser.add_argument("--no-exec", action="store_true",
                        help="never execute plans")
    parser.add_argument("--persist-kb", action="store_true",
                        help="write learned concepts back to the KB on exit")
    parser.add_argument("--trace", action="store_true",
                        help="dump the pipeline trace after each utterance")
    parser.add_argument("--lenient", action="store_true",
                        help="warn instead of failing on unknown KB fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frameground",
        description="frame interpretation engine for imperative dialogue",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_repl = sub.add_parser("repl", help="interactive dialogue loop")
    _add_session_flags(p_repl)
    p_repl.set_defaults(func=cmd_repl)

    p_run = sub.add_parser("run", help="run a transcript with expectations")
    p_run.add_argument("transcript", help="transcript file")
    _add_session_flags(p_run)
    p_run.add_argument("--emit-events", action="store_true",
                       help="print the canonical event log JSON at the end")
    p_run.set_defaults(func=cmd_run)

    p_validate = sub.add_parser("validate", help="check a KB directory")
    p_validate.add_argument("kb", help="knowledge base directory")
    p_validate.add_argument("--lenient", action="store_true")
    p_validate.set_defaults(func=cmd_validate)

    p_serve = sub.add_parser("serve", help="run the TCP gateway")
    _add_session_flags(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=7401)
    p_serve.add_argument("--heartbeat", type=float, default=30.0,
                         help="seconds between ping pushes (0 disables)")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
