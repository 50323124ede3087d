"""Line-delimited JSON gateway exposing sessions over TCP.

One JSON object per line, UTF-8.  Client messages carry type, session,
seq, payload; the server replies in kind and pushes event.* messages
mirroring session events.  Message field names are documented in
docs/protocol.md.  Messages for a session are processed strictly in the
order received, and their seq values must strictly increase.
"""

from __future__ import annotations

import itertools
import json
import socketserver
import threading
from dataclasses import dataclass
from typing import Dict, Optional

from .interpreter import DefinitionAnswer, SenseAnswer
from .kbio import KBError
from .model import ConceptDefinition, ORelation, PartOfSpeech
from .session import (
    IndexOutOfRange,
    NoPendingChoice,
    NoPendingInquiry,
    Policy,
    Session,
    SessionBusy,
    answer_inquiry,
    choose_plan,
    event_name,
    event_to_dict,
    open_session,
    submit_utterance,
)

HEARTBEAT_INTERVAL = 30.0


@dataclass
class GatewayConfig:
    kb_path: str
    language: str = "en"
    policy: Policy = Policy.ASK_USER
    heartbeat_interval: float = HEARTBEAT_INTERVAL
    no_exec: bool = False
    lenient: bool = False


class _ProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _parse_definition(payload: dict, default_language: str) -> ConceptDefinition:
    if not isinstance(payload, dict) or "lemma" not in payload \
            or "type" not in payload:
        raise _ProtocolError(
            "bad-payload", "definition needs at least lemma and type"
        )
    relations = []
    for entry in payload.get("relations", []):
        if (not isinstance(entry, list) or len(entry) not in (2, 3)
                or not all(isinstance(x, str) for x in entry)):
            raise _ProtocolError("bad-payload", f"bad relation {entry!r}")
        value = entry[2] if len(entry) == 3 else None
        relations.append(ORelation(kind=entry[0], target=entry[1], value=value))
    try:
        pos = PartOfSpeech(payload.get("part_of_speech", "noun"))
    except ValueError:
        raise _ProtocolError(
            "bad-payload",
            f"bad part_of_speech {payload.get('part_of_speech')!r}",
        )
    return ConceptDefinition(
        lemma=str(payload["lemma"]),
        language=str(payload.get("language", default_language)),
        concept_type=str(payload["type"]),
        relations=tuple(relations),
        part_of_speech=pos,
        gloss=str(payload.get("gloss", "")),
    )


class _Connection(socketserver.StreamRequestHandler):
    """One client connection; sessions opened here live and die with it."""

    server: "GatewayServer"

    def setup(self) -> None:
        super().setup()
        self.sessions: Dict[str, Session] = {}
        self.session_counter = itertools.count(1)
        self.server_seq: Dict[Optional[str], itertools.count] = {}
        self.client_seq: Dict[str, int] = {}
        self.sent_events: Dict[str, int] = {}
        self.write_lock = threading.Lock()
        self.closing = threading.Event()
        interval = self.server.config.heartbeat_interval
        self.heartbeat = None
        if interval > 0:
            self.heartbeat = threading.Thread(
                target=self._heartbeat_loop, args=(interval,), daemon=True
            )
            self.heartbeat.start()

    def finish(self) -> None:
        self.closing.set()
        super().finish()

    def _heartbeat_loop(self, interval: float) -> None:
        while not self.closing.wait(interval):
            try:
                self._send("ping", None, {})
            except OSError:
                return

    def _next_seq(self, session_id: Optional[str]) -> int:
        counter = self.server_seq.setdefault(session_id, itertools.count(1))
        return next(counter)

    def _send(self, msg_type: str, session_id: Optional[str],
              payload: dict) -> None:
        message = {
            "type": msg_type,
            "session": session_id,
            "seq": self._next_seq(session_id),
            "payload": payload,
        }
        data = json.dumps(
            message, sort_keys=True, separators=(",", ":"), ensure_ascii=False
        ).encode("utf-8") + b"\n"
        with self.write_lock:
            self.wfile.write(data)
            self.wfile.flush()

    def _send_error(self, session_id: Optional[str], code: str,
                    message: str) -> None:
        self._send("error", session_id, {"code": code, "message": message})

    def _push_events(self, session_id: str, session: Session) -> None:
        start = self.sent_events.get(session_id, 0)
        for event in session.events[start:]:
            self._send(
                "event." + event_name(event), session_id, event_to_dict(event)
            )
        self.sent_events[session_id] = len(session.events)

    def handle(self) -> None:
        for raw in self.rfile:
            line = raw.strip()
            if not line:
                continue
            try:
                message = json.loads(line)
            except json.JSONDecodeError as exc:
                self._send_error(None, "bad-json", str(exc))
                continue
            if not isinstance(message, dict) or \
                    not isinstance(message.get("type"), str):
                self._send_error(None, "bad-json", "message needs a type")
                continue
            try:
                self._dispatch(message)
            except _ProtocolError as exc:
                self._send_error(message.get("session"), exc.code, str(exc))
            except OSError:
                return

    def _session_for(self, message: dict) -> Session:
        session_id = message.get("session")
        if not isinstance(session_id, str) or session_id not in self.sessions:
            raise _ProtocolError(
                "unknown-session", f"no session {session_id!r}"
            )
        seq = message.get("seq")
        if not isinstance(seq, int):
            raise _ProtocolError("bad-payload", "seq must be an integer")
        last = self.client_seq.get(session_id, 0)
        if seq <= last:
            raise _ProtocolError(
                "seq-order", f"seq {seq} not greater than {last}"
            )
        self.client_seq[session_id] = seq
        return self.sessions[session_id]

    def _dispatch(self, message: dict) -> None:
        msg_type = message["type"]
        payload = message.get("payload")
        payload = payload if isinstance(payload, dict) else {}
        if msg_type == "ping":
            self._send("pong", message.get("session"), payload)
            return
        if msg_type == "pong":
            return
        if msg_type == "session.open":
            self._open_session(payload)
            return
        if msg_type == "utterance.submit":
            session = self._session_for(message)
            text = payload.get("text")
            if not isinstance(text, str) or not text.strip():
                raise _ProtocolError("bad-payload", "text must be a string")
            try:
                submit_utterance(session, text)
            except SessionBusy as exc:
                raise _ProtocolError("session-busy", str(exc))
            self._push_events(message["session"], session)
            return
        if msg_type == "inquiry.answer":
            session = self._session_for(message)
            answer = self._parse_answer(payload, session)
            try:
                answer_inquiry(session, answer)
            except NoPendingInquiry as exc:
                raise _ProtocolError("no-pending-inquiry", str(exc))
            self._push_events(message["session"], session)
            return
        if msg_type == "ambiguity.choose":
            session = self._session_for(message)
            index = payload.get("index")
            if not isinstance(index, int):
                raise _ProtocolError("bad-payload", "index must be an integer")
            try:
                choose_plan(session, index)
            except NoPendingChoice as exc:
                raise _ProtocolError("no-pending-choice", str(exc))
            except IndexOutOfRange as exc:
                raise _ProtocolError("index-out-of-range", str(exc))
            self._push_events(message["session"], session)
            return
        if msg_type == "kb.concepts":
            session = self._session_for(message)
            self._send(
                "kb.concepts.reply", message["session"],
                {"concepts": _concept_listing(session)},
            )
            return
        if msg_type == "pipeline.trace":
            session = self._session_for(message)
            trace = session.last_trace
            self._send(
                "pipeline.trace.reply", message["session"],
                {"trace": trace.to_dict() if trace else None},
            )
            return
        raise _ProtocolError("unknown-type", f"unknown type {msg_type!r}")

    def _open_session(self, payload: dict) -> None:
        config = self.server.config
        kb_path = payload.get("kb", config.kb_path)
        language = payload.get("language", config.language)
        policy = payload.get("policy", config.policy.value)
        try:
            policy = Policy(policy)
        except ValueError:
            raise _ProtocolError("bad-payload", f"bad policy {policy!r}")
        session_id = f"sess-{next(self.session_counter)}"
        try:
            session = open_session(
                kb_path, language, policy,
                session_id=session_id,
                no_exec=bool(payload.get("no_exec", config.no_exec)),
                lenient=config.lenient,
            )
        except (KBError, OSError) as exc:
            raise _ProtocolError("kb-error", str(exc))
        self.sessions[session_id] = session
        self._send(
            "session.opened", session_id,
            {
                "id": session_id,
                "language": language,
                "policy": policy.value,
                "kb": str(kb_path),
            },
        )

    def _parse_answer(self, payload: dict, session: Session):
        if "sense" in payload:
            sense_id = payload["sense"]
            if not isinstance(sense_id, str):
                raise _ProtocolError("bad-payload", "sense must be a string id")
            return SenseAnswer(sense_id=sense_id)
        if "definition" in payload:
            return DefinitionAnswer(
                definition=_parse_definition(
                    payload["definition"], session.language
                )
            )
        raise _ProtocolError(
            "bad-payload", "answer needs either sense or definition"
        )


def _concept_listing(session: Session) -> list:
    store = session.store
    out = []
    for node in store.concepts():
        out.append({
            "id": node.id,
            "type": node.o_layer.concept_type,
            "label": store.node_label(node.id, session.language),
            "compound_of": list(node.compound_of),
            "relations": [
                [r.kind, r.target] if r.value is None
                else [r.kind, r.target, r.value]
                for r in node.o_layer.relations
            ],
        })
    return out


class GatewayServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, config: GatewayConfig):
        self.config = config
        super().__init__(address, _Connection)


def serve(
    host: str, port: int, config: GatewayConfig, *, background: bool = False
) -> GatewayServer:
    """Start the gateway.  With background=True the server runs on a
    daemon thread and the call returns immediately (tests use this);
    otherwise it blocks until interrupted."""
    server = GatewayServer((host, port), config)
    if background:
        thread = threading.Thread(
            target=server.serve_forever, kwargs={"poll_interval": 0.05},
            daemon=True,
        )
        thread.start()
        return server
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return server
