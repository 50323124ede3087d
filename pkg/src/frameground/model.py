"""Domain model for the agent memory.

Everything the engine reasons over lives here: the concept ontology
(:class:`OLNode`), the per-language sense lexicon (:class:`Sense`), verb
frames and frame sets, and the strategy machinery that turns a verb sense
into candidate plans.

All types are immutable; the store mutates by replacing whole records.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence, Tuple


class PartOfSpeech(str, Enum):
    NOUN = "noun"
    VERB = "verb"
    ADJECTIVE = "adjective"
    ADVERB = "adverb"


class SenseRelationKind(str, Enum):
    SYNONYM = "synonym"
    HYPERNYM = "hypernym"
    HYPONYM = "hyponym"


@dataclass(frozen=True)
class SenseRelation:
    kind: SenseRelationKind
    target: str  # sense id


@dataclass(frozen=True)
class Sense:
    """One word sense in one language."""

    id: str
    language: str
    lemma: str
    part_of_speech: PartOfSpeech
    gloss: str = ""
    relations: Tuple[SenseRelation, ...] = ()


@dataclass(frozen=True)
class CompoundSenseCandidate(Sense):
    """A sense the store can offer for a multiword phrase before the
    matching compound concept has been created.

    Carries the constituent senses so the caller can materialize the
    compound; the id given here is the id the materialized sense will have.
    """

    constituents: Tuple[Sense, ...] = ()


@dataclass(frozen=True)
class ORelation:
    """A relation in the ontology layer, e.g. ("color", "n:blue")."""

    kind: str
    target: str  # node id
    value: Optional[str] = None


@dataclass(frozen=True)
class OLayer:
    """Non-descriptive side of a node: typification plus relations.

    ``concept_type`` is the id of the parent node, or None for a root.
    """

    concept_type: Optional[str]
    relations: Tuple[ORelation, ...] = ()


@dataclass(frozen=True)
class OLNode:
    """A concept: an ontology layer plus per-language sense attachments."""

    id: str
    o_layer: OLayer
    l_layer: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)
    compound_of: Tuple[str, ...] = ()

    def senses_for(self, language: str) -> Tuple[str, ...]:
        return tuple(self.l_layer.get(language, ()))


VERB_SLOT = "V"


@dataclass(frozen=True)
class Frame:
    """Paired structural pattern and semantic roles, e.g.
    ["NP", "V", "NP"] / ["Agent", "V", "Theme"]."""

    id: str
    structural_pattern: Tuple[str, ...]
    semantic_roles: Tuple[str, ...]

    @property
    def verb_position(self) -> int:
        return self.structural_pattern.index(VERB_SLOT)

    def roles_without_verb(self) -> Tuple[str, ...]:
        return tuple(r for i, r in enumerate(self.semantic_roles)
                     if self.structural_pattern[i] != VERB_SLOT)


@dataclass(frozen=True)
class FrameSet:
    """A verb's frames together with the verb senses they describe."""

    id: str
    verb_lemma: str
    language: str
    frames: Tuple[str, ...]       # frame ids, declaration order
    verb_senses: Tuple[str, ...]  # sense ids, declaration order


@dataclass(frozen=True)
class StrategyAssociation:
    """Links one verb sense to its ordered execution strategies.

    Serialized as the ``alpha`` record kind in KB directories.
    """

    id: str
    verb_sense: str
    strategies: Tuple[str, ...]


class RestrictionKind(str, Enum):
    IS_A = "is_a"
    HAS_RELATION = "has_relation"
    COMPETENCY_AVAILABLE = "competency_available"


@dataclass(frozen=True)
class Restriction:
    """A single predicate gating an execution strategy.

    role      -- the semantic role whose bound concept is inspected
                 (ignored for competency_available)
    kind      -- which predicate form this is
    target    -- node id (is_a, has_relation) or competency id
    relation  -- relation kind, has_relation only
    """

    role: str
    kind: RestrictionKind
    target: str
    relation: Optional[str] = None


@dataclass(frozen=True)
class TemplateStep:
    """One step of an abstract plan: an action whose parameters are bound
    to semantic roles (parameter name -> role label)."""

    competency: str
    action: str
    bindings: Tuple[Tuple[str, str], ...] = ()

    def roles(self) -> Tuple[str, ...]:
        return tuple(role for _, role in self.bindings)


@dataclass(frozen=True)
class ExecutionStrategy:
    id: str
    name: str
    restrictions: Tuple[Restriction, ...] = ()
    required_competencies: Tuple[str, ...] = ()
    plan_template: Tuple[TemplateStep, ...] = ()


@dataclass(frozen=True)
class CompetencyAction:
    name: str
    parameters: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CompetencyDescriptor:
    """An abstraction of one of the agent's sensors or actuators."""

    id: str
    name: str
    actions: Tuple[CompetencyAction, ...] = ()
    results: Tuple[str, ...] = ()
    available: bool = True


@dataclass(frozen=True)
class ConceptDefinition:
    """A user-supplied description of a new concept: lemma, typification
    target and property relations, all over existing nodes."""

    lemma: str
    language: str
    concept_type: str
    relations: Tuple[ORelation, ...] = ()
    part_of_speech: PartOfSpeech = PartOfSpeech.NOUN
    gloss: str = ""


def compound_node_id(constituent_node_ids: Sequence[str]) -> str:
    return "n:cmp:" + "+".join(sorted(constituent_node_ids))


def compound_sense_id(constituent_sense_ids: Sequence[str]) -> str:
    # Word order preserved: "blue ball" and "ball blue" are distinct senses
    # even when they ground to the same compound node.
    return "s:cmp:" + "+".join(constituent_sense_ids)


def content_hash(payload: object) -> str:
    """Stable short hash of a JSON-serializable value."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]
