"""Dialogue session: one utterance at a time through the pipeline.

A session is idle, waiting for an inquiry answer, or waiting for an
ambiguity choice.  Every operation appends the events it produced to the
session's ordered event log and returns the first new one; the log is
what determinism tests and the gateway replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from .competency import (
    CompetencyEnvironment,
    ExecutionTrace,
    Plan,
    execute_plan,
)
from .interpreter import (
    AnswerUnresolvable,
    InquiryAnswer,
    InterpretOutcome,
    PendingInquiry,
    PipelineTrace,
    ResumptionHandle,
    Complete,
    Suspended,
    interpret,
    resume,
)
from .kbio import load_knowledge_base, save_knowledge_base
from .memory import MemoryStore
from .parsing import ParseError, parse_utterance


class Policy(str, Enum):
    ASK_USER = "ask_user"
    AUTO_FIRST = "auto_first"


class SessionState(str, Enum):
    IDLE = "idle"
    AWAITING_INQUIRY = "awaiting_inquiry"
    AWAITING_CHOICE = "awaiting_choice"


class SessionBusy(RuntimeError):
    pass


class NoPendingInquiry(RuntimeError):
    pass


class NoPendingChoice(RuntimeError):
    pass


class IndexOutOfRange(IndexError):
    pass


@dataclass(frozen=True)
class PlanSummary:
    plan: str
    strategy: str
    strategy_name: str
    bindings: Tuple[Tuple[str, str, str], ...]  # (role, node id, label)


@dataclass(frozen=True)
class PlansReady:
    plans: Tuple[PlanSummary, ...]


@dataclass(frozen=True)
class InquiryRequested:
    inquiry: PendingInquiry
    diagnostics: Optional[str] = None


@dataclass(frozen=True)
class AmbiguityDetected:
    plans: Tuple[PlanSummary, ...]


@dataclass(frozen=True)
class NoActionPossible:
    pass


@dataclass(frozen=True)
class ParseFailed:
    reason: str


@dataclass(frozen=True)
class PlanExecuted:
    trace: ExecutionTrace


SessionEvent = object  # union of the six dataclasses above


EVENT_NAMES = {
    PlansReady: "plans_ready",
    InquiryRequested: "inquiry",
    AmbiguityDetected: "ambiguity",
    NoActionPossible: "no_action",
    ParseFailed: "parse_failed",
    PlanExecuted: "executed",
}


def event_name(event: SessionEvent) -> str:
    return EVENT_NAMES[type(event)]


def summary_dict(summary: PlanSummary) -> dict:
    return {
        "plan": summary.plan,
        "strategy": summary.strategy,
        "name": summary.strategy_name,
        "bindings": {
            role: {"node": node_id, "label": label}
            for role, node_id, label in summary.bindings
        },
    }


def event_to_dict(event: SessionEvent) -> dict:
    if isinstance(event, PlansReady):
        return {
            "type": "plans_ready",
            "plans": [summary_dict(s) for s in event.plans],
        }
    if isinstance(event, InquiryRequested):
        payload = {
            "type": "inquiry",
            "argument": event.inquiry.argument_text,
            "language": event.inquiry.language,
            "candidates": [
                {"id": s.id, "lemma": s.lemma, "gloss": s.gloss}
                for s in event.inquiry.candidate_definitions
            ],
        }
        if event.diagnostics is not None:
            payload["diagnostics"] = event.diagnostics
        return payload
    if isinstance(event, AmbiguityDetected):
        return {
            "type": "ambiguity",
            "plans": [summary_dict(s) for s in event.plans],
        }
    if isinstance(event, NoActionPossible):
        return {"type": "no_action"}
    if isinstance(event, ParseFailed):
        return {"type": "parse_failed", "reason": event.reason}
    if isinstance(event, PlanExecuted):
        return {
            "type": "executed",
            "plan": event.trace.plan,
            "steps": [
                {
                    "competency": e.competency,
                    "action": e.action,
                    "bindings": dict(e.bindings),
                    "result": e.result,
                }
                for e in event.trace.entries
            ],
        }
    raise TypeError(f"not a session event: {type(event).__name__}")


class Session:
    def __init__(
        self,
        session_id: str,
        language: str,
        store: MemoryStore,
        env: CompetencyEnvironment,
        policy: Policy,
        kb_path: Optional[str] = None,
        no_exec: bool = False,
        augmenter=None,
    ):
        self.id = session_id
        self.language = language
        self.store = store
        self.env = env
        self.policy = policy
        self.kb_path = kb_path
        self.no_exec = no_exec
        self.augmenter = augmenter
        self.state = SessionState.IDLE
        self.pending_handle: Optional[ResumptionHandle] = None
        self.pending_plans: Tuple[Plan, ...] = ()
        self.events: List[SessionEvent] = []
        self.traces: List[PipelineTrace] = []

    @property
    def last_trace(self) -> Optional[PipelineTrace]:
        return self.traces[-1] if self.traces else None

    def event_log(self) -> List[dict]:
        return [event_to_dict(e) for e in self.events]

    def event_log_json(self) -> str:
        return json.dumps(
            self.event_log(), sort_keys=True, separators=(",", ":"),
            ensure_ascii=False,
        )


def open_session(
    kb_path,
    language: str = "en",
    policy: Policy = Policy.ASK_USER,
    *,
    session_id: str = "local",
    no_exec: bool = False,
    lenient: bool = False,
    augmenter=None,
) -> Session:
    """Load the KB, register its competencies, and hand back an idle
    session.  Load problems propagate as the loader's typed errors."""
    store = load_knowledge_base(kb_path, lenient=lenient)
    env = CompetencyEnvironment.from_store(store)
    return Session(
        session_id=session_id,
        language=language,
        store=store,
        env=env,
        policy=Policy(policy),
        kb_path=str(kb_path),
        no_exec=no_exec,
        augmenter=augmenter,
    )


def close_session(session: Session, *, persist_kb: bool = False) -> None:
    """Abandon any suspension; optionally write the (possibly augmented)
    store back to its KB directory."""
    if session.pending_handle is not None:
        session.pending_handle.abort()
        session.pending_handle = None
    session.pending_plans = ()
    session.state = SessionState.IDLE
    if persist_kb and session.kb_path is not None:
        save_knowledge_base(session.store, session.kb_path)


def _summarize(plan: Plan, store: MemoryStore, language: str) -> PlanSummary:
    strategy = store.strategy(plan.strategy)
    bindings = tuple(
        sorted(
            (role, node_id, store.node_label(node_id, language))
            for role, _position, node_id in plan.meaning.role_bindings
        )
    )
    return PlanSummary(
        plan=plan.id,
        strategy=plan.strategy,
        strategy_name=strategy.name if strategy else plan.strategy,
        bindings=bindings,
    )


def _emit(session: Session, event: SessionEvent) -> SessionEvent:
    session.events.append(event)
    return event


def _execute(session: Session, plan: Plan) -> SessionEvent:
    trace = execute_plan(plan, session.env)
    return _emit(session, PlanExecuted(trace=trace))


def _dispatch(session: Session, outcome: InterpretOutcome) -> SessionEvent:
    if isinstance(outcome, Suspended):
        session.pending_handle = outcome.handle
        session.state = SessionState.AWAITING_INQUIRY
        return _emit(session, InquiryRequested(inquiry=outcome.inquiry))
    plans = outcome.plans
    session.state = SessionState.IDLE
    if not plans:
        return _emit(session, NoActionPossible())
    summaries = tuple(
        _summarize(p, session.store, session.language) for p in plans
    )
    if len(plans) >= 2 and session.policy is Policy.ASK_USER:
        session.pending_plans = plans
        session.state = SessionState.AWAITING_CHOICE
        return _emit(session, AmbiguityDetected(plans=summaries))
    # Single plan, or auto_first: surface the list, then run plan 0.
    first = _emit(session, PlansReady(plans=summaries))
    if not session.no_exec:
        _execute(session, plans[0])
    return first


def submit_utterance(session: Session, text: str) -> SessionEvent:
    """Parse and interpret one utterance; returns the first new event."""
    if session.state is not SessionState.IDLE:
        raise SessionBusy(f"session is {session.state.value}")
    try:
        tree = parse_utterance(
            text, session.language,
            session.store.verb_lemmas(session.language),
        )
    except ParseError as exc:
        return _emit(
            session,
            ParseFailed(reason=f"{type(exc).__name__}: {exc}"),
        )
    trace = PipelineTrace(utterance=text, language=session.language)
    session.traces.append(trace)
    outcome = interpret(
        tree, session.language, session.store, session.env,
        trace=trace, augmenter=session.augmenter,
    )
    return _dispatch(session, outcome)


def answer_inquiry(session: Session, answer: InquiryAnswer) -> SessionEvent:
    """Route an inquiry answer into the suspended interpretation.

    An unusable answer re-raises the same inquiry with diagnostics and
    leaves the suspension in place for another try.
    """
    if (session.state is not SessionState.AWAITING_INQUIRY
            or session.pending_handle is None):
        raise NoPendingInquiry("no inquiry is waiting for an answer")
    handle = session.pending_handle
    try:
        outcome = resume(handle, answer)
    except AnswerUnresolvable as exc:
        return _emit(
            session,
            InquiryRequested(inquiry=handle.inquiry, diagnostics=str(exc)),
        )
    session.pending_handle = None
    return _dispatch(session, outcome)


def choose_plan(session: Session, index: int) -> SessionEvent:
    """Resolve an ambiguity by executing the plan at the given index."""
    if (session.state is not SessionState.AWAITING_CHOICE
            or not session.pending_plans):
        raise NoPendingChoice("no plan choice is pending")
    if not 0 <= index < len(session.pending_plans):
        raise IndexOutOfRange(
            f"index {index} outside 0..{len(session.pending_plans) - 1}"
        )
    plan = session.pending_plans[index]
    session.pending_plans = ()
    session.state = SessionState.IDLE
    if session.no_exec:
        summary = _summarize(plan, session.store, session.language)
        return _emit(session, PlansReady(plans=(summary,)))
    return _execute(session, plan)
