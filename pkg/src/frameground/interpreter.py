"""Frame interpretation: matching, sense combination, meaning binding.

The pipeline walks every FrameSet of the utterance's verb, checks the
tree shape against its frames, enumerates constituent-sense combinations,
binds strategy associations, validates each (meaning, strategy) pair, and
instantiates plans for the survivors.

When a constituent has no known sense the enumeration suspends: the
internal generators yield a PendingInquiry and the public API wraps the
paused generator in a single-shot ResumptionHandle.  Feeding it a valid
answer resumes exactly where the walk stopped, so the final outcome is
the one a non-suspended run over the augmented memory would have
produced.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Callable, Generator, List, Optional, Sequence, Tuple, Union

from .competency import CompetencyEnvironment, Plan, instantiate, strategies_for
from .competency import valid as validate_strategy
from .memory import MemoryStore, UnknownRelationTarget, UnknownType
from .model import CompoundSenseCandidate, ConceptDefinition, FrameSet, Frame, Sense
from .parsing import Category, UtteranceTree


class InquiryAborted(RuntimeError):
    def __init__(self, inquiry: "PendingInquiry"):
        super().__init__(f"inquiry for {inquiry.argument_text!r} was abandoned")
        self.inquiry = inquiry


class HandleAlreadyUsed(RuntimeError):
    pass


class AnswerUnresolvable(ValueError):
    """The supplied answer cannot settle the pending inquiry."""


@dataclass(frozen=True)
class PendingInquiry:
    argument_text: str
    language: str
    candidate_definitions: Tuple[Sense, ...] = ()


@dataclass(frozen=True)
class SenseAnswer:
    """Point the unknown argument at an existing, concept-attached sense."""

    sense_id: str


@dataclass(frozen=True)
class DefinitionAnswer:
    """Define a new concept for the unknown argument's vocabulary."""

    definition: ConceptDefinition


InquiryAnswer = Union[SenseAnswer, DefinitionAnswer]


@dataclass(frozen=True)
class AnnotatedTree:
    """An utterance tree with one sense chosen per noun phrase."""

    base: UtteranceTree
    arg_senses: Tuple[Tuple[int, str], ...]  # (constituent position, sense id)

    def sense_at(self, position: int) -> Optional[str]:
        for pos, sense_id in self.arg_senses:
            if pos == position:
                return sense_id
        return None


@dataclass(frozen=True)
class MeaningTree:
    """An annotated tree bound to a strategy association and a frame."""

    annotated: AnnotatedTree
    verb_alpha: str  # StrategyAssociation id
    frame: str  # Frame id
    role_bindings: Tuple[Tuple[str, int, str], ...]  # (role, position, node id)

    def node_for_role(self, role: str) -> Optional[str]:
        for bound_role, _position, node_id in self.role_bindings:
            if bound_role == role:
                return node_id
        return None

    def content(self) -> dict:
        return {
            "frame": self.frame,
            "alpha": self.verb_alpha,
            "senses": [[p, s] for p, s in self.annotated.arg_senses],
            "bindings": [[r, p, n] for r, p, n in self.role_bindings],
        }


@dataclass(frozen=True)
class Complete:
    plans: Tuple[Plan, ...]


class ResumptionHandle:
    """Single-shot continuation for a suspended interpretation."""

    def __init__(self, gen: Generator, inquiry: PendingInquiry,
                 store: MemoryStore):
        self._gen = gen
        self._inquiry = inquiry
        self._store = store
        self._lock = threading.Lock()
        self.used = False

    @property
    def inquiry(self) -> PendingInquiry:
        return self._inquiry

    def abort(self) -> None:
        with self._lock:
            if not self.used:
                self.used = True
                self._gen.close()


@dataclass(frozen=True)
class Suspended:
    inquiry: PendingInquiry
    handle: ResumptionHandle


InterpretOutcome = Union[Complete, Suspended]


# -- pipeline trace -----------------------------------------------------


@dataclass
class ArgumentTrace:
    text: str
    raw_pairs: int
    resolved: int
    inquiries: int = 0


@dataclass
class FrameSetTrace:
    frameset: str
    sound: bool
    frame: Optional[str] = None
    meanings: int = 0


@dataclass
class ValidationTrace:
    frameset: str
    strategy: str
    strategy_name: str
    meaning_index: int
    valid: bool
    failed_role: Optional[str] = None
    failed_kind: Optional[str] = None
    failed_target: Optional[str] = None
    reason: Optional[str] = None


@dataclass
class PipelineTrace:
    """Per-utterance record of every pipeline stage, for inspection."""

    utterance: str
    language: str
    verb: str = ""
    arguments: List[ArgumentTrace] = field(default_factory=list)
    framesets: List[FrameSetTrace] = field(default_factory=list)
    validations: List[ValidationTrace] = field(default_factory=list)
    combination_count: int = 0
    meaning_count: int = 0
    plan_count: int = 0
    suspensions: int = 0

    @property
    def raw_space(self) -> int:
        product = 1
        for argument in self.arguments:
            product *= argument.raw_pairs
        return product if self.arguments else 0

    def to_dict(self) -> dict:
        return {
            "utterance": self.utterance,
            "language": self.language,
            "verb": self.verb,
            "arguments": [
                {
                    "text": a.text,
                    "raw_pairs": a.raw_pairs,
                    "resolved": a.resolved,
                    "inquiries": a.inquiries,
                }
                for a in self.arguments
            ],
            "framesets": [
                {
                    "id": f.frameset,
                    "sound": f.sound,
                    "frame": f.frame,
                    "meanings": f.meanings,
                }
                for f in self.framesets
            ],
            "validations": [
                {
                    "frameset": v.frameset,
                    "strategy": v.strategy,
                    "name": v.strategy_name,
                    "meaning": v.meaning_index,
                    "valid": v.valid,
                    "failed": None if v.valid else {
                        "role": v.failed_role,
                        "kind": v.failed_kind,
                        "target": v.failed_target,
                        "reason": v.reason,
                    },
                }
                for v in self.validations
            ],
            "funnel": {
                "raw_pairs": self.raw_space,
                "combinations": self.combination_count,
                "meanings": self.meaning_count,
                "plans": self.plan_count,
            },
            "suspensions": self.suspensions,
        }


# -- frame matching -----------------------------------------------------


def _category_sequence(tree: UtteranceTree) -> Tuple[str, ...]:
    return tuple(c.category.value for c in tree.constituents)


def sound(frameset: FrameSet, tree: UtteranceTree, store: MemoryStore) -> bool:
    """True iff the tree's category sequence equals some frame's pattern."""
    sequence = _category_sequence(tree)
    for frame_id in frameset.frames:
        frame = store.frame(frame_id)
        if frame is not None and frame.structural_pattern == sequence:
            return True
    return False


def select_frame(
    frameset: FrameSet, tree: UtteranceTree, store: MemoryStore
) -> Frame:
    """First declared frame matching the tree; caller must ensure sound."""
    sequence = _category_sequence(tree)
    for frame_id in frameset.frames:
        frame = store.frame(frame_id)
        if frame is not None and frame.structural_pattern == sequence:
            return frame
    raise ValueError(f"no frame of {frameset.id!r} matches the tree")


# -- sense combination --------------------------------------------------

Augmenter = Callable[[PendingInquiry], Optional[Sequence[Sense]]]


def _definition_candidates(
    phrase: Sequence[str], language: str, store: MemoryStore
) -> Tuple[Sense, ...]:
    joined = " ".join(phrase).lower()
    found = [
        s for s in store.senses_of_lemma(joined, language)
        if store.node_of_sense(s.id) is None
    ]
    if not found:
        for word in phrase:
            found.extend(
                s for s in store.senses_of_lemma(word, language)
                if store.node_of_sense(s.id) is None
            )
    return tuple(sorted(found, key=lambda s: s.id))


def combinations(
    tree: UtteranceTree,
    language: str,
    store: MemoryStore,
    *,
    trace: Optional[PipelineTrace] = None,
    augmenter: Optional[Augmenter] = None,
) -> Generator[PendingInquiry, Optional[List[Sense]], List[AnnotatedTree]]:
    """Enumerate every assignment of senses to the tree's noun phrases.

    Yields a PendingInquiry whenever an argument resolves to nothing and
    expects back either a sense list (use directly) or None (re-query the
    memory, which the answerer has just augmented).  Returns the full
    cross-product in argument order x sense-id order.  Compound sense
    candidates are materialized in memory as they are committed to a
    combination.
    """
    positions = [
        (i, c) for i, c in enumerate(tree.constituents)
        if c.category is Category.NP
    ]
    per_position = []
    for position, constituent in positions:
        phrase = list(constituent.content_tokens)
        senses = store.ask(phrase, language)
        arg_trace = None
        if trace is not None:
            arg_trace = ArgumentTrace(
                text=constituent.text,
                raw_pairs=store.raw_pair_count(phrase, language),
                resolved=len(senses),
            )
            trace.arguments.append(arg_trace)
        if not senses and augmenter is not None:
            augmented = augmenter(PendingInquiry(
                argument_text=constituent.text,
                language=language,
                candidate_definitions=_definition_candidates(
                    phrase, language, store),
            ))
            if augmented:
                senses = list(augmented)
        while not senses:
            if arg_trace is not None:
                arg_trace.inquiries += 1
            if trace is not None:
                trace.suspensions += 1
            answer = yield PendingInquiry(
                argument_text=constituent.text,
                language=language,
                candidate_definitions=_definition_candidates(
                    phrase, language, store),
            )
            if answer is None:
                senses = store.ask(phrase, language)
            else:
                senses = list(answer)
        if arg_trace is not None:
            arg_trace.resolved = len(senses)
        per_position.append((position, senses))
    results = []
    for combo in itertools.product(*(s for _, s in per_position)):
        pairs = []
        for (position, _), sense in zip(per_position, combo):
            if isinstance(sense, CompoundSenseCandidate):
                store.mutator.create_compound_concept(sense.constituents)
            pairs.append((position, sense.id))
        results.append(AnnotatedTree(base=tree, arg_senses=tuple(pairs)))
    return results


def complete(
    gen: Generator,
    channel: Optional[Callable[[PendingInquiry], Optional[List[Sense]]]] = None,
):
    """Drive a resumable enumeration to its return value.

    channel answers each inquiry with a sense list (or None to re-query
    after augmenting).  Without a channel, or when the channel raises
    StopIteration, the enumeration is abandoned with InquiryAborted.
    """
    try:
        inquiry = next(gen)
    except StopIteration as stop:
        return stop.value
    while True:
        if channel is None:
            gen.close()
            raise InquiryAborted(inquiry)
        try:
            answer = channel(inquiry)
        except StopIteration:
            gen.close()
            raise InquiryAborted(inquiry) from None
        try:
            inquiry = gen.send(answer)
        except StopIteration as stop:
            return stop.value


# -- meaning construction ----------------------------------------------


def _bind_meaning(
    frame: Frame,
    annotated: AnnotatedTree,
    association_id: str,
    store: MemoryStore,
) -> MeaningTree:
    tree = annotated.base
    bindings = []
    for position, role in enumerate(frame.semantic_roles):
        constituent = tree.constituents[position]
        if constituent.category is not Category.NP:
            continue
        sense_id = annotated.sense_at(position)
        node_id = store.node_of_sense(sense_id) if sense_id else None
        if node_id is None:
            raise RuntimeError(
                f"sense {sense_id!r} has no concept; combination enumeration "
                "must only emit concept-attached senses"
            )
        bindings.append((role, position, node_id))
    return MeaningTree(
        annotated=annotated,
        verb_alpha=association_id,
        frame=frame.id,
        role_bindings=tuple(bindings),
    )


def meanings(
    frameset: FrameSet,
    tree: UtteranceTree,
    language: str,
    store: MemoryStore,
    *,
    frame: Optional[Frame] = None,
    combos: Optional[List[AnnotatedTree]] = None,
    trace: Optional[PipelineTrace] = None,
    augmenter: Optional[Augmenter] = None,
) -> Generator[PendingInquiry, Optional[List[Sense]], List[MeaningTree]]:
    """One MeaningTree per (verb sense with an association) x combination.

    Verb senses keep their FrameSet declaration order; senses without a
    strategy association contribute nothing.
    """
    if frame is None:
        frame = select_frame(frameset, tree, store)
    if combos is None:
        combos = yield from combinations(
            tree, language, store, trace=trace, augmenter=augmenter
        )
    out = []
    for sense_id in frameset.verb_senses:
        association = store.find_strategy_association(sense_id)
        if association is None:
            continue
        for annotated in combos:
            out.append(_bind_meaning(frame, annotated, association.id, store))
    return out


# -- the interpretation loop -------------------------------------------


def _interpret_gen(
    tree: UtteranceTree,
    language: str,
    store: MemoryStore,
    env: CompetencyEnvironment,
    trace: Optional[PipelineTrace],
    augmenter: Optional[Augmenter],
) -> Generator[PendingInquiry, Optional[List[Sense]], List[Plan]]:
    plans: List[Plan] = []
    if trace is not None:
        trace.verb = tree.verb
    framesets = store.framesets_of_verb(tree.verb, language)
    combos: Optional[List[AnnotatedTree]] = None
    for frameset in framesets:
        fs_trace = FrameSetTrace(frameset=frameset.id, sound=False)
        if trace is not None:
            trace.framesets.append(fs_trace)
        if not sound(frameset, tree, store):
            continue
        frame = select_frame(frameset, tree, store)
        fs_trace.sound = True
        fs_trace.frame = frame.id
        if combos is None:
            combos = yield from combinations(
                tree, language, store, trace=trace, augmenter=augmenter
            )
            if trace is not None:
                trace.combination_count = len(combos)
        found = yield from meanings(
            frameset, tree, language, store, frame=frame, combos=combos
        )
        fs_trace.meanings = len(found)
        if trace is not None:
            trace.meaning_count += len(found)
        for meaning_index, meaning in enumerate(found):
            association = store.association(meaning.verb_alpha)
            for strategy in strategies_for(association, frame, store):
                result = validate_strategy(strategy, meaning, env, store)
                if trace is not None:
                    entry = ValidationTrace(
                        frameset=frameset.id,
                        strategy=strategy.id,
                        strategy_name=strategy.name,
                        meaning_index=meaning_index,
                        valid=result.valid,
                    )
                    if not result.valid:
                        restriction, reason = result.failed_restriction
                        entry.failed_role = restriction.role
                        entry.failed_kind = restriction.kind.value
                        entry.failed_target = restriction.target
                        entry.reason = reason
                    trace.validations.append(entry)
                if result.valid:
                    plans.append(instantiate(strategy, meaning))
    if trace is not None:
        trace.plan_count = len(plans)
    return plans


def _advance(gen: Generator, store: MemoryStore,
             send_value=None, first: bool = True) -> InterpretOutcome:
    try:
        if first:
            inquiry = next(gen)
        else:
            inquiry = gen.send(send_value)
    except StopIteration as stop:
        return Complete(plans=tuple(stop.value))
    return Suspended(inquiry=inquiry,
                     handle=ResumptionHandle(gen, inquiry, store))


def interpret(
    tree: UtteranceTree,
    language: str,
    store: MemoryStore,
    env: CompetencyEnvironment,
    *,
    trace: Optional[PipelineTrace] = None,
    augmenter: Optional[Augmenter] = None,
) -> InterpretOutcome:
    """Interpret a parsed utterance against the memory.

    Returns Complete with the ordered plan list (possibly empty: the
    utterance was understood but nothing validates), or Suspended with
    the inquiry for the first unknown argument.
    """
    gen = _interpret_gen(tree, language, store, env, trace, augmenter)
    return _advance(gen, store)


def _resolve_answer(
    handle: ResumptionHandle, answer: InquiryAnswer
) -> Optional[List[Sense]]:
    """Validate an answer; returns senses to inject or None to re-query.

    Raises AnswerUnresolvable without consuming the handle.
    """
    store = handle._store
    inquiry = handle.inquiry
    if isinstance(answer, SenseAnswer):
        sense = store.sense(answer.sense_id)
        if sense is None:
            raise AnswerUnresolvable(f"no sense with id {answer.sense_id!r}")
        if sense.language != inquiry.language:
            raise AnswerUnresolvable(
                f"sense {sense.id!r} is {sense.language!r}, inquiry needs "
                f"{inquiry.language!r}"
            )
        if store.node_of_sense(sense.id) is None:
            raise AnswerUnresolvable(
                f"sense {sense.id!r} is not attached to any concept"
            )
        return [sense]
    if isinstance(answer, DefinitionAnswer):
        definition = answer.definition
        if definition.language != inquiry.language:
            raise AnswerUnresolvable(
                f"definition is {definition.language!r}, inquiry needs "
                f"{inquiry.language!r}"
            )
        try:
            store.mutator.add_concept_definition(definition)
        except (UnknownType, UnknownRelationTarget) as exc:
            raise AnswerUnresolvable(str(exc)) from exc
        return None
    raise TypeError(f"unsupported answer type {type(answer).__name__}")


def resume(handle: ResumptionHandle, answer: InquiryAnswer) -> InterpretOutcome:
    """Feed an answer to a suspended interpretation and run it onward.

    The handle is consumed only when the answer checks out; a rejected
    answer raises AnswerUnresolvable and the same handle stays usable.
    """
    with handle._lock:
        if handle.used:
            raise HandleAlreadyUsed("this suspension was already resumed")
        senses = _resolve_answer(handle, answer)
        handle.used = True
    return _advance(handle._gen, handle._store, senses, first=False)
