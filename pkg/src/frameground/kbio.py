"""Flat-file knowledge base: a `manifest` plus JSONL record files.

The manifest is a JSON object with `format_version`, `languages`, and
`files`.  Each listed file holds one JSON object per line; the `kind`
field selects the record type (sense, concept, frame, frameset, alpha,
strategy, competency).  Tuples serialize as JSON arrays.  Loading is
two-phase: parse every record first, then build and cross-check, so
duplicate ids are caught no matter which file they land in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .memory import MemoryStore
from .model import (
    CompetencyAction,
    CompetencyDescriptor,
    ExecutionStrategy,
    Frame,
    FrameSet,
    OLayer,
    OLNode,
    ORelation,
    PartOfSpeech,
    Restriction,
    RestrictionKind,
    Sense,
    SenseRelation,
    SenseRelationKind,
    StrategyAssociation,
    TemplateStep,
    VERB_SLOT,
)

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest"
RECORD_KINDS = (
    "sense",
    "concept",
    "frame",
    "frameset",
    "alpha",
    "strategy",
    "competency",
)

class KBError(Exception):
    """Base for knowledge base load failures."""


class MalformedRecord(KBError):
    def __init__(self, message: str, file: str = "", line: int = 0):
        where = f"{file}:{line}: " if file else ""
        super().__init__(f"{where}{message}")
        self.file = file
        self.line = line


class DuplicateId(KBError):
    def __init__(self, record_id: str, file: str = "", line: int = 0):
        super().__init__(f"duplicate id {record_id!r} at {file}:{line}")
        self.record_id = record_id
        self.file = file
        self.line = line


class UnresolvedReference(KBError):
    def __init__(self, record_id: str, field_name: str, target: str):
        super().__init__(
            f"record {record_id!r} field {field_name!r} references "
            f"unknown id {target!r}"
        )
        self.record_id = record_id
        self.field_name = field_name
        self.target = target


class CycleDetected(KBError):
    def __init__(self, graph: str, involving: str):
        super().__init__(f"cycle in {graph} graph involving {involving!r}")
        self.graph = graph
        self.involving = involving


class InvariantViolation(KBError):
    def __init__(self, record_id: str, message: str):
        super().__init__(f"record {record_id!r}: {message}")
        self.record_id = record_id


@dataclass(frozen=True)
class Finding:
    """One problem discovered while loading or validating a KB."""

    severity: str  # "error" or "warning"
    code: str
    message: str
    file: str = ""
    line: int = 0
    record_id: str = ""
    field_name: str = ""  # unresolved-reference only
    target: str = ""      # unresolved-reference only

    def format(self) -> str:
        where = f"{self.file}:{self.line}" if self.file else "-"
        subject = f" ({self.record_id})" if self.record_id else ""
        return f"{self.severity} [{self.code}] {where}{subject}: {self.message}"


def _exception_for(finding: Finding) -> KBError:
    if finding.code == "duplicate-id":
        return DuplicateId(finding.record_id, finding.file, finding.line)
    if finding.code == "unresolved-reference":
        return UnresolvedReference(
            finding.record_id, finding.field_name, finding.target
        )
    if finding.code.startswith("cycle-"):
        return CycleDetected(finding.code[len("cycle-"):], finding.record_id)
    if finding.code in ("malformed-record", "manifest", "unknown-field"):
        return MalformedRecord(finding.message, finding.file, finding.line)
    return InvariantViolation(finding.record_id, finding.message)


class _Bad(Exception):
    """Internal: record fails its schema; message is user-facing."""


_SCHEMAS: Dict[str, Tuple[frozenset, frozenset]] = {
    "sense": (
        frozenset({"id", "language", "lemma", "part_of_speech"}),
        frozenset({"gloss", "relations"}),
    ),
    "concept": (frozenset({"id", "o_layer"}), frozenset({"l_layer", "compound_of"})),
    "frame": (frozenset({"id", "structural_pattern", "semantic_roles"}), frozenset()),
    "frameset": (
        frozenset({"id", "verb_lemma", "language", "frames", "verb_senses"}),
        frozenset(),
    ),
    "alpha": (frozenset({"id", "verb_sense", "strategies"}), frozenset()),
    "strategy": (
        frozenset({"id", "name"}),
        frozenset({"restrictions", "required_competencies", "plan_template"}),
    ),
    "competency": (
        frozenset({"id", "name"}),
        frozenset({"actions", "results", "available"}),
    ),
}


def _need_str(data: Mapping, key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str) or not value:
        raise _Bad(f"field {key!r} must be a non-empty string")
    return value


def _opt_str(data: Mapping, key: str, default: str = "") -> str:
    value = data.get(key, default)
    if not isinstance(value, str):
        raise _Bad(f"field {key!r} must be a string")
    return value


def _str_list(data: Mapping, key: str, default: Optional[list] = None) -> List[str]:
    value = data.get(key, default if default is not None else [])
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise _Bad(f"field {key!r} must be a list of strings")
    return value


class _RawRecord:
    __slots__ = ("kind", "data", "file", "line")

    def __init__(self, kind: str, data: dict, file: str, line: int):
        self.kind = kind
        self.data = data
        self.file = file
        self.line = line


class _Loader:
    def __init__(self, root: Path, lenient: bool):
        self.root = root
        self.lenient = lenient
        self.findings: List[Finding] = []
        self.records: List[_RawRecord] = []
        self.store = MemoryStore()
        self._seen_ids: Dict[str, Tuple[str, int]] = {}

    # -- finding helpers ------------------------------------------------

    def error(self, code: str, message: str, file: str = "", line: int = 0,
              record_id: str = "") -> None:
        self.findings.append(Finding("error", code, message, file, line, record_id))

    def warn(self, code: str, message: str, file: str = "", line: int = 0,
             record_id: str = "") -> None:
        self.findings.append(Finding("warning", code, message, file, line, record_id))

    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    # -- phases ---------------------------------------------------------

    def run(self, stop_on_error: bool) -> None:
        manifest_ok = self.read_manifest()
        if stop_on_error:
            self._maybe_raise()
        if not manifest_ok:
            return
        self.parse_files()
        if stop_on_error:
            self._maybe_raise()
        self.build()
        if stop_on_error:
            self._maybe_raise()
        self.check_references()
        if stop_on_error:
            self._maybe_raise()
        self.check_cycles()
        self.check_invariants()
        if stop_on_error:
            self._maybe_raise()

    def _maybe_raise(self) -> None:
        errors = self.errors()
        if errors:
            raise _exception_for(errors[0])

    def read_manifest(self) -> bool:
        path = self.root / MANIFEST_NAME
        if not path.is_file():
            self.error("manifest", f"missing manifest file at {path}", MANIFEST_NAME)
            return False
        try:
            data = json.loads(path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            self.error("manifest", f"unreadable manifest: {exc}", MANIFEST_NAME)
            return False
        if not isinstance(data, dict):
            self.error("manifest", "manifest must be a JSON object", MANIFEST_NAME)
            return False
        unknown = set(data) - {"format_version", "languages", "files"}
        if unknown:
            message = f"unknown manifest fields: {sorted(unknown)}"
            if self.lenient:
                self.warn("unknown-field", message, MANIFEST_NAME)
            else:
                self.error("unknown-field", message, MANIFEST_NAME)
        if data.get("format_version") != FORMAT_VERSION:
            self.error(
                "manifest",
                f"unsupported format_version {data.get('format_version')!r}",
                MANIFEST_NAME,
            )
            return False
        languages = data.get("languages")
        if not isinstance(languages, list) or not all(
            isinstance(t, str) and t and t == t.lower() for t in languages
        ):
            self.error(
                "manifest",
                "languages must be a list of non-empty lowercase tags",
                MANIFEST_NAME,
            )
            return False
        files = data.get("files")
        if not isinstance(files, list) or not all(isinstance(f, str) for f in files):
            self.error("manifest", "files must be a list of names", MANIFEST_NAME)
            return False
        self.store.languages = tuple(languages)
        self.files = list(files)
        return True

    def parse_files(self) -> None:
        for name in self.files:
            path = self.root / name
            if not path.is_file():
                self.error("manifest", f"listed file {name!r} is missing", name)
                continue
            try:
                text = path.read_text("utf-8")
            except OSError as exc:
                self.error("manifest", f"cannot read {name!r}: {exc}", name)
                continue
            for line_no, line in enumerate(text.splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as exc:
                    self.error("malformed-record", f"invalid JSON: {exc}",
                               name, line_no)
                    continue
                if not isinstance(data, dict):
                    self.error("malformed-record", "record must be a JSON object",
                               name, line_no)
                    continue
                kind = data.get("kind")
                if kind not in RECORD_KINDS:
                    self.error("malformed-record", f"unknown record kind {kind!r}",
                               name, line_no)
                    continue
                record_id = data.get("id")
                if not isinstance(record_id, str) or not record_id:
                    self.error("malformed-record", "record has no id", name, line_no)
                    continue
                if record_id in self._seen_ids:
                    self.error("duplicate-id", f"id {record_id!r} already defined",
                               name, line_no, record_id)
                    continue
                self._seen_ids[record_id] = (name, line_no)
                self.records.append(_RawRecord(kind, data, name, line_no))

    def build(self) -> None:
        builders: Dict[str, Callable[[dict], object]] = {
            "sense": self._build_sense,
            "concept": self._build_concept,
            "frame": self._build_frame,
            "frameset": self._build_frameset,
            "alpha": self._build_alpha,
            "strategy": self._build_strategy,
            "competency": self._build_competency,
        }
        store = self.store
        for raw in self.records:
            required, optional = _SCHEMAS[raw.kind]
            fields = set(raw.data) - {"kind"}
            missing = required - fields
            unknown = fields - required - optional
            if missing:
                self.error(
                    "malformed-record",
                    f"missing fields {sorted(missing)}",
                    raw.file, raw.line, raw.data.get("id", ""),
                )
                continue
            if unknown:
                message = f"unknown fields {sorted(unknown)}"
                if self.lenient:
                    self.warn("unknown-field", message, raw.file, raw.line,
                              raw.data.get("id", ""))
                else:
                    self.error("unknown-field", message, raw.file, raw.line,
                               raw.data.get("id", ""))
                    continue
            try:
                obj = builders[raw.kind](raw.data)
            except _Bad as exc:
                self.error("malformed-record", str(exc), raw.file, raw.line,
                           raw.data.get("id", ""))
                continue
            if isinstance(obj, Sense):
                store._senses[obj.id] = obj
                store._index_sense(obj)
            elif isinstance(obj, OLNode):
                store._nodes[obj.id] = obj
            elif isinstance(obj, Frame):
                store._frames[obj.id] = obj
            elif isinstance(obj, FrameSet):
                store._framesets[obj.id] = obj
                store._index_frameset(obj)
            elif isinstance(obj, StrategyAssociation):
                if obj.verb_sense in store._association_by_sense:
                    self.error(
                        "invariant",
                        f"verb sense {obj.verb_sense!r} already has a strategy "
                        "association",
                        raw.file, raw.line, obj.id,
                    )
                    continue
                store._associations[obj.id] = obj
                store._index_association(obj)
            elif isinstance(obj, ExecutionStrategy):
                store._strategies[obj.id] = obj
            elif isinstance(obj, CompetencyDescriptor):
                store._competencies[obj.id] = obj
        for node in store._nodes.values():
            store._index_node(node)

    # -- record builders -------------------------------------------------

    def _build_sense(self, data: dict) -> Sense:
        try:
            pos = PartOfSpeech(_need_str(data, "part_of_speech"))
        except ValueError:
            raise _Bad(f"bad part_of_speech {data.get('part_of_speech')!r}")
        relations = []
        raw_relations = data.get("relations", [])
        if not isinstance(raw_relations, list):
            raise _Bad("relations must be a list")
        for entry in raw_relations:
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, str) for x in entry)):
                raise _Bad(f"bad sense relation {entry!r}")
            try:
                kind = SenseRelationKind(entry[0])
            except ValueError:
                raise _Bad(f"bad sense relation kind {entry[0]!r}")
            relations.append(SenseRelation(kind=kind, target=entry[1]))
        return Sense(
            id=_need_str(data, "id"),
            language=_need_str(data, "language"),
            lemma=_need_str(data, "lemma"),
            part_of_speech=pos,
            gloss=_opt_str(data, "gloss"),
            relations=tuple(relations),
        )

    def _build_concept(self, data: dict) -> OLNode:
        o_layer = data.get("o_layer")
        if not isinstance(o_layer, dict):
            raise _Bad("o_layer must be an object")
        unknown = set(o_layer) - {"concept_type", "relations"}
        if unknown:
            raise _Bad(f"unknown o_layer fields {sorted(unknown)}")
        concept_type = o_layer.get("concept_type")
        if concept_type is not None and (
            not isinstance(concept_type, str) or not concept_type
        ):
            raise _Bad("concept_type must be null or a node id")
        relations = []
        for entry in o_layer.get("relations", []):
            if (not isinstance(entry, list) or len(entry) not in (2, 3)
                    or not all(isinstance(x, str) for x in entry[:2])):
                raise _Bad(f"bad o_layer relation {entry!r}")
            value = entry[2] if len(entry) == 3 else None
            if value is not None and not isinstance(value, str):
                raise _Bad(f"bad o_layer relation value {value!r}")
            relations.append(ORelation(kind=entry[0], target=entry[1], value=value))
        l_layer_raw = data.get("l_layer", {})
        if not isinstance(l_layer_raw, dict):
            raise _Bad("l_layer must map language tags to sense id lists")
        l_layer = {}
        for tag, ids in l_layer_raw.items():
            if not isinstance(tag, str) or not isinstance(ids, list) or not all(
                isinstance(i, str) for i in ids
            ):
                raise _Bad("l_layer must map language tags to sense id lists")
            l_layer[tag] = tuple(ids)
        return OLNode(
            id=_need_str(data, "id"),
            o_layer=OLayer(concept_type=concept_type, relations=tuple(relations)),
            l_layer=l_layer,
            compound_of=tuple(_str_list(data, "compound_of")),
        )

    def _build_frame(self, data: dict) -> Frame:
        return Frame(
            id=_need_str(data, "id"),
            structural_pattern=tuple(_str_list(data, "structural_pattern")),
            semantic_roles=tuple(_str_list(data, "semantic_roles")),
        )

    def _build_frameset(self, data: dict) -> FrameSet:
        return FrameSet(
            id=_need_str(data, "id"),
            verb_lemma=_need_str(data, "verb_lemma"),
            language=_need_str(data, "language"),
            frames=tuple(_str_list(data, "frames")),
            verb_senses=tuple(_str_list(data, "verb_senses")),
        )

    def _build_alpha(self, data: dict) -> StrategyAssociation:
        return StrategyAssociation(
            id=_need_str(data, "id"),
            verb_sense=_need_str(data, "verb_sense"),
            strategies=tuple(_str_list(data, "strategies")),
        )

    def _build_strategy(self, data: dict) -> ExecutionStrategy:
        restrictions = []
        raw_restrictions = data.get("restrictions", [])
        if not isinstance(raw_restrictions, list):
            raise _Bad("restrictions must be a list")
        for entry in raw_restrictions:
            if not isinstance(entry, dict) or set(entry) != {"role", "predicate"}:
                raise _Bad(f"bad restriction {entry!r}")
            predicate = entry["predicate"]
            if (not isinstance(predicate, list) or not predicate
                    or not all(isinstance(x, str) for x in predicate)):
                raise _Bad(f"bad restriction predicate {predicate!r}")
            head = predicate[0]
            if head == RestrictionKind.IS_A.value and len(predicate) == 2:
                restriction = Restriction(
                    role=entry["role"], kind=RestrictionKind.IS_A,
                    target=predicate[1],
                )
            elif head == RestrictionKind.HAS_RELATION.value and len(predicate) == 3:
                restriction = Restriction(
                    role=entry["role"], kind=RestrictionKind.HAS_RELATION,
                    target=predicate[2], relation=predicate[1],
                )
            elif (head == RestrictionKind.COMPETENCY_AVAILABLE.value
                  and len(predicate) == 2):
                restriction = Restriction(
                    role=entry["role"], kind=RestrictionKind.COMPETENCY_AVAILABLE,
                    target=predicate[1],
                )
            else:
                raise _Bad(f"bad restriction predicate {predicate!r}")
            if not isinstance(restriction.role, str) or not restriction.role:
                raise _Bad("restriction role must be a non-empty string")
            restrictions.append(restriction)
        steps = []
        raw_template = data.get("plan_template", [])
        if not isinstance(raw_template, list):
            raise _Bad("plan_template must be a list")
        for entry in raw_template:
            if (not isinstance(entry, list) or len(entry) != 3
                    or not isinstance(entry[0], str) or not isinstance(entry[1], str)
                    or not isinstance(entry[2], dict)):
                raise _Bad(f"bad plan_template step {entry!r}")
            bindings = entry[2]
            if not all(
                isinstance(k, str) and isinstance(v, str)
                for k, v in bindings.items()
            ):
                raise _Bad(f"bad step bindings {bindings!r}")
            steps.append(TemplateStep(
                competency=entry[0],
                action=entry[1],
                bindings=tuple(sorted(bindings.items())),
            ))
        return ExecutionStrategy(
            id=_need_str(data, "id"),
            name=_need_str(data, "name"),
            restrictions=tuple(restrictions),
            required_competencies=tuple(_str_list(data, "required_competencies")),
            plan_template=tuple(steps),
        )

    def _build_competency(self, data: dict) -> CompetencyDescriptor:
        actions = []
        raw_actions = data.get("actions", [])
        if not isinstance(raw_actions, list):
            raise _Bad("actions must be a list")
        for entry in raw_actions:
            if (not isinstance(entry, list) or len(entry) != 2
                    or not isinstance(entry[0], str)
                    or not isinstance(entry[1], list)
                    or not all(isinstance(p, str) for p in entry[1])):
                raise _Bad(f"bad action {entry!r}")
            actions.append(CompetencyAction(name=entry[0],
                                            parameters=tuple(entry[1])))
        available = data.get("available", True)
        if not isinstance(available, bool):
            raise _Bad("available must be a boolean")
        return CompetencyDescriptor(
            id=_need_str(data, "id"),
            name=_need_str(data, "name"),
            actions=tuple(actions),
            results=tuple(_str_list(data, "results")),
            available=available,
        )

    # -- cross-record checks ---------------------------------------------

    def _where(self, record_id: str) -> Tuple[str, int]:
        return self._seen_ids.get(record_id, ("", 0))

    def _check_ref(self, owner: str, field_name: str, target: str,
                   table: Mapping[str, object]) -> bool:
        if target in table:
            return True
        file, line = self._where(owner)
        self.findings.append(Finding(
            "error", "unresolved-reference",
            f"field {field_name!r} references unknown id {target!r}",
            file, line, owner, field_name, target,
        ))
        return False

    def check_references(self) -> None:
        store = self.store
        registered = set(store.languages)
        for sense in store._senses.values():
            for relation in sense.relations:
                self._check_ref(sense.id, "relations", relation.target,
                                store._senses)
            if sense.language not in registered:
                file, line = self._where(sense.id)
                self.error(
                    "invariant",
                    f"language {sense.language!r} not in manifest",
                    file, line, sense.id,
                )
        for node in store._nodes.values():
            if node.o_layer.concept_type is not None:
                self._check_ref(node.id, "concept_type",
                                node.o_layer.concept_type, store._nodes)
            for relation in node.o_layer.relations:
                self._check_ref(node.id, "o_layer.relations", relation.target,
                                store._nodes)
            for tag, sense_ids in node.l_layer.items():
                if tag not in registered:
                    file, line = self._where(node.id)
                    self.error("invariant", f"language {tag!r} not in manifest",
                               file, line, node.id)
                for sid in sense_ids:
                    self._check_ref(node.id, "l_layer", sid, store._senses)
            for target in node.compound_of:
                self._check_ref(node.id, "compound_of", target, store._nodes)
        for fs in store._framesets.values():
            if fs.language not in registered:
                file, line = self._where(fs.id)
                self.error("invariant", f"language {fs.language!r} not in manifest",
                           file, line, fs.id)
            for frame_id in fs.frames:
                self._check_ref(fs.id, "frames", frame_id, store._frames)
            for sense_id in fs.verb_senses:
                self._check_ref(fs.id, "verb_senses", sense_id, store._senses)
        for assoc in store._associations.values():
            self._check_ref(assoc.id, "verb_sense", assoc.verb_sense,
                            store._senses)
            for strategy_id in assoc.strategies:
                self._check_ref(assoc.id, "strategies", strategy_id,
                                store._strategies)
        for strategy in store._strategies.values():
            for restriction in strategy.restrictions:
                if restriction.kind is RestrictionKind.COMPETENCY_AVAILABLE:
                    self._check_ref(strategy.id, "restrictions",
                                    restriction.target, store._competencies)
                else:
                    self._check_ref(strategy.id, "restrictions",
                                    restriction.target, store._nodes)
            for competency_id in strategy.required_competencies:
                self._check_ref(strategy.id, "required_competencies",
                                competency_id, store._competencies)
            for step in strategy.plan_template:
                self._check_ref(strategy.id, "plan_template", step.competency,
                                store._competencies)

    def check_cycles(self) -> None:
        store = self.store
        # Typification chains must terminate at a root.
        state: Dict[str, int] = {}  # 0 in progress, 1 done
        for start in store._nodes:
            if start in state:
                continue
            path = []
            current: Optional[str] = start
            while current is not None and current in store._nodes:
                if state.get(current) == 1:
                    break
                if state.get(current) == 0:
                    self.error("cycle-typification",
                               f"typification cycle through {current!r}",
                               *self._where(current), record_id=current)
                    break
                state[current] = 0
                path.append(current)
                current = store._nodes[current].o_layer.concept_type
            for node_id in path:
                state[node_id] = 1
        # Sense hypernym edges must be acyclic.
        colors: Dict[str, int] = {}

        def visit(sense_id: str, stack: List[str]) -> None:
            colors[sense_id] = 0
            stack.append(sense_id)
            sense = store._senses.get(sense_id)
            if sense is not None:
                for relation in sense.relations:
                    if relation.kind is not SenseRelationKind.HYPERNYM:
                        continue
                    target = relation.target
                    if colors.get(target) == 0:
                        self.error("cycle-hypernym",
                                   f"hypernym cycle through {target!r}",
                                   *self._where(target), record_id=target)
                    elif target not in colors and target in store._senses:
                        visit(target, stack)
            stack.pop()
            colors[sense_id] = 1

        for sense_id in store._senses:
            if sense_id not in colors:
                visit(sense_id, [])

    def check_invariants(self) -> None:
        store = self.store
        for frame in store._frames.values():
            pattern, roles = frame.structural_pattern, frame.semantic_roles
            if len(pattern) != len(roles):
                self.error("invariant",
                           "structural_pattern and semantic_roles differ in length",
                           *self._where(frame.id), record_id=frame.id)
                continue
            v_pattern = [i for i, c in enumerate(pattern) if c == VERB_SLOT]
            v_roles = [i for i, r in enumerate(roles) if r == VERB_SLOT]
            if len(v_pattern) != 1 or v_pattern != v_roles:
                self.error("invariant",
                           "frame must have exactly one V at matching positions",
                           *self._where(frame.id), record_id=frame.id)
                continue
            non_verb = [r for r in roles if r != VERB_SLOT]
            if len(set(non_verb)) != len(non_verb):
                self.error("invariant", "duplicate semantic role labels",
                           *self._where(frame.id), record_id=frame.id)
        all_roles = {
            role
            for frame in store._frames.values()
            for role in frame.semantic_roles
        }
        for fs in store._framesets.values():
            if not fs.frames:
                self.error("invariant", "frameset has no frames",
                           *self._where(fs.id), record_id=fs.id)
            for sense_id in fs.verb_senses:
                sense = store._senses.get(sense_id)
                if sense is None:
                    continue  # already reported as unresolved
                if (sense.part_of_speech is not PartOfSpeech.VERB
                        or sense.lemma.lower() != fs.verb_lemma.lower()
                        or sense.language != fs.language):
                    self.error(
                        "invariant",
                        f"verb sense {sense_id!r} does not match "
                        f"{fs.verb_lemma!r}/{fs.language!r} as a verb",
                        *self._where(fs.id), record_id=fs.id,
                    )
        for assoc in store._associations.values():
            if not assoc.strategies:
                self.error("invariant", "association has no strategies",
                           *self._where(assoc.id), record_id=assoc.id)
        for strategy in store._strategies.values():
            seen = set()
            for competency_id in strategy.required_competencies:
                if competency_id in seen:
                    self.error("invariant",
                               f"duplicate required competency {competency_id!r}",
                               *self._where(strategy.id), record_id=strategy.id)
                seen.add(competency_id)
            for restriction in strategy.restrictions:
                if all_roles and restriction.role not in all_roles:
                    self.error(
                        "invariant",
                        f"restriction role {restriction.role!r} is not a known "
                        "semantic role",
                        *self._where(strategy.id), record_id=strategy.id,
                    )
            for step in strategy.plan_template:
                for role in step.roles():
                    if all_roles and role not in all_roles:
                        self.error(
                            "invariant",
                            f"plan template role {role!r} is not a known "
                            "semantic role",
                            *self._where(strategy.id), record_id=strategy.id,
                        )
        for node in store._nodes.values():
            if node.compound_of and len(node.compound_of) < 2:
                self.error("invariant", "compound node needs >= 2 constituents",
                           *self._where(node.id), record_id=node.id)


def load_knowledge_base(
    path, *, lenient: bool = False,
    on_warning: Optional[Callable[[Finding], None]] = None,
) -> MemoryStore:
    """Load a KB directory, raising a typed error on the first problem.

    With lenient=True, unknown fields produce warning findings (delivered
    to on_warning) instead of failing the load.
    """
    loader = _Loader(Path(path), lenient=lenient)
    loader.run(stop_on_error=True)
    if on_warning is not None:
        for finding in loader.findings:
            if finding.severity == "warning":
                on_warning(finding)
    return loader.store


def validate_knowledge_base(path, *, lenient: bool = False) -> List[Finding]:
    """Best-effort sweep: collect every finding instead of stopping."""
    loader = _Loader(Path(path), lenient=lenient)
    loader.run(stop_on_error=False)
    return loader.findings


# -- serialization ------------------------------------------------------


def sense_record(sense: Sense) -> dict:
    record = {
        "kind": "sense",
        "id": sense.id,
        "language": sense.language,
        "lemma": sense.lemma,
        "part_of_speech": sense.part_of_speech.value,
    }
    if sense.gloss:
        record["gloss"] = sense.gloss
    if sense.relations:
        record["relations"] = [[r.kind.value, r.target] for r in sense.relations]
    return record


def concept_record(node: OLNode) -> dict:
    o_layer: dict = {"concept_type": node.o_layer.concept_type}
    if node.o_layer.relations:
        o_layer["relations"] = [
            [r.kind, r.target] if r.value is None else [r.kind, r.target, r.value]
            for r in node.o_layer.relations
        ]
    record = {"kind": "concept", "id": node.id, "o_layer": o_layer}
    if node.l_layer:
        record["l_layer"] = {
            tag: list(ids) for tag, ids in sorted(node.l_layer.items())
        }
    if node.compound_of:
        record["compound_of"] = list(node.compound_of)
    return record


def frame_record(frame: Frame) -> dict:
    return {
        "kind": "frame",
        "id": frame.id,
        "structural_pattern": list(frame.structural_pattern),
        "semantic_roles": list(frame.semantic_roles),
    }


def frameset_record(fs: FrameSet) -> dict:
    return {
        "kind": "frameset",
        "id": fs.id,
        "verb_lemma": fs.verb_lemma,
        "language": fs.language,
        "frames": list(fs.frames),
        "verb_senses": list(fs.verb_senses),
    }


def association_record(assoc: StrategyAssociation) -> dict:
    return {
        "kind": "alpha",
        "id": assoc.id,
        "verb_sense": assoc.verb_sense,
        "strategies": list(assoc.strategies),
    }


def strategy_record(strategy: ExecutionStrategy) -> dict:
    record: dict = {"kind": "strategy", "id": strategy.id, "name": strategy.name}
    if strategy.restrictions:
        serialized = []
        for r in strategy.restrictions:
            if r.kind is RestrictionKind.HAS_RELATION:
                predicate = [r.kind.value, r.relation, r.target]
            else:
                predicate = [r.kind.value, r.target]
            serialized.append({"role": r.role, "predicate": predicate})
        record["restrictions"] = serialized
    if strategy.required_competencies:
        record["required_competencies"] = list(strategy.required_competencies)
    if strategy.plan_template:
        record["plan_template"] = [
            [step.competency, step.action, dict(step.bindings)]
            for step in strategy.plan_template
        ]
    return record


def competency_record(descriptor: CompetencyDescriptor) -> dict:
    record: dict = {
        "kind": "competency",
        "id": descriptor.id,
        "name": descriptor.name,
    }
    if descriptor.actions:
        record["actions"] = [
            [a.name, list(a.parameters)] for a in descriptor.actions
        ]
    if descriptor.results:
        record["results"] = list(descriptor.results)
    if not descriptor.available:
        record["available"] = False
    return record


def save_knowledge_base(store: MemoryStore, path) -> None:
    """Write the store back out as a loadable KB directory."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    groups = {
        "senses.jsonl": store.all_senses(),
        "concepts.jsonl": store.concepts(),
        "frames.jsonl": [store.frame(i) for i in sorted(store._frames)],
        "framesets.jsonl": [store.frameset(i) for i in sorted(store._framesets)],
        "alphas.jsonl": [store.association(i) for i in sorted(store._associations)],
        "strategies.jsonl": [store.strategy(i) for i in sorted(store._strategies)],
        "competencies.jsonl": store.competencies(),
    }
    serializers = {
        "senses.jsonl": sense_record,
        "concepts.jsonl": concept_record,
        "frames.jsonl": frame_record,
        "framesets.jsonl": frameset_record,
        "alphas.jsonl": association_record,
        "strategies.jsonl": strategy_record,
        "competencies.jsonl": competency_record,
    }
    file_names = []
    for name, objects in groups.items():
        lines = [json.dumps(serializers[name](obj), ensure_ascii=False)
                 for obj in objects]
        (root / name).write_text(
            "".join(line + "\n" for line in lines), "utf-8"
        )
        file_names.append(name)
    manifest = {
        "format_version": FORMAT_VERSION,
        "languages": sorted(store.languages),
        "files": file_names,
    }
    (root / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", "utf-8"
    )


def write_knowledge_base(
    path,
    *,
    languages: Sequence[str],
    senses: Iterable[Sense] = (),
    nodes: Iterable[OLNode] = (),
    frames: Iterable[Frame] = (),
    framesets: Iterable[FrameSet] = (),
    associations: Iterable[StrategyAssociation] = (),
    strategies: Iterable[ExecutionStrategy] = (),
    competencies: Iterable[CompetencyDescriptor] = (),
) -> None:
    """Write model objects straight to a KB directory (fixture authoring)."""
    store = MemoryStore()
    store.languages = tuple(languages)
    for sense in senses:
        store._senses[sense.id] = sense
        store._index_sense(sense)
    for node in nodes:
        store._nodes[node.id] = node
        store._index_node(node)
    for frame in frames:
        store._frames[frame.id] = frame
    for fs in framesets:
        store._framesets[fs.id] = fs
        store._index_frameset(fs)
    for assoc in associations:
        store._associations[assoc.id] = assoc
        store._index_association(assoc)
    for strategy in strategies:
        store._strategies[strategy.id] = strategy
    for descriptor in competencies:
        store._competencies[descriptor.id] = descriptor
    save_knowledge_base(store, path)
