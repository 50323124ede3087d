"""The agent's memory: loaded records plus the query surface.

Reads are lock-free and safe from any thread.  Mutations (compound
creation, new definitions) go through :class:`MutationHandle`, which
serializes writers and inserts records in an order that keeps every
partially-applied mutation unreachable: a sense only becomes visible
through the lemma index or a node's sense list, and those are updated
last.
"""

from __future__ import annotations

import itertools
import threading
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .model import (
    CompetencyDescriptor,
    CompoundSenseCandidate,
    ConceptDefinition,
    ExecutionStrategy,
    Frame,
    FrameSet,
    OLayer,
    OLNode,
    PartOfSpeech,
    Sense,
    StrategyAssociation,
    compound_node_id,
    compound_sense_id,
)

DETERMINERS = frozenset({"the", "a", "an"})


class ConstituentUnknown(KeyError):
    """A compound constituent sense has no concept attached."""

    def __init__(self, sense_id: str):
        super().__init__(sense_id)
        self.sense_id = sense_id


class UnknownType(KeyError):
    """A definition names a typification target that does not exist."""


class UnknownRelationTarget(KeyError):
    """A definition names a relation target that does not exist."""


def _content_tokens(tokens: Sequence[str]) -> List[str]:
    return [t for t in tokens if t.lower() not in DETERMINERS]


class MemoryStore:
    """Immutable-by-default record store; mutate via :attr:`mutator`."""

    def __init__(self) -> None:
        self._senses: Dict[str, Sense] = {}
        self._nodes: Dict[str, OLNode] = {}
        self._frames: Dict[str, Frame] = {}
        self._framesets: Dict[str, FrameSet] = {}
        self._associations: Dict[str, StrategyAssociation] = {}
        self._strategies: Dict[str, ExecutionStrategy] = {}
        self._competencies: Dict[str, CompetencyDescriptor] = {}
        self.languages: Tuple[str, ...] = ()
        # Derived indexes
        self._lemma_index: Dict[Tuple[str, str], List[str]] = {}
        self._sense_node: Dict[str, str] = {}
        self._compound_by_nodes: Dict[FrozenSet[str], str] = {}
        self._association_by_sense: Dict[str, str] = {}
        self._framesets_by_verb: Dict[Tuple[str, str], List[str]] = {}
        self._write_lock = threading.RLock()
        self._mutator = MutationHandle(self)

    # -- plumbing used by the loader and the mutation handle ------------

    def _index_sense(self, sense: Sense) -> None:
        key = (sense.language, sense.lemma.lower())
        self._lemma_index.setdefault(key, []).append(sense.id)
        self._lemma_index[key].sort()

    def _index_node(self, node: OLNode) -> None:
        for sense_ids in node.l_layer.values():
            for sid in sense_ids:
                self._sense_node[sid] = node.id
        if node.compound_of:
            self._compound_by_nodes[frozenset(node.compound_of)] = node.id

    def _index_association(self, assoc: StrategyAssociation) -> None:
        self._association_by_sense[assoc.verb_sense] = assoc.id

    def _index_frameset(self, fs: FrameSet) -> None:
        key = (fs.language, fs.verb_lemma.lower())
        self._framesets_by_verb.setdefault(key, []).append(fs.id)
        self._framesets_by_verb[key].sort()

    # -- accessors -------------------------------------------------------

    def sense(self, sense_id: str) -> Optional[Sense]:
        return self._senses.get(sense_id)

    def node(self, node_id: str) -> Optional[OLNode]:
        return self._nodes.get(node_id)

    def frame(self, frame_id: str) -> Optional[Frame]:
        return self._frames.get(frame_id)

    def frameset(self, frameset_id: str) -> Optional[FrameSet]:
        return self._framesets.get(frameset_id)

    def strategy(self, strategy_id: str) -> Optional[ExecutionStrategy]:
        return self._strategies.get(strategy_id)

    def competency(self, competency_id: str) -> Optional[CompetencyDescriptor]:
        return self._competencies.get(competency_id)

    def association(self, assoc_id: str) -> Optional[StrategyAssociation]:
        return self._associations.get(assoc_id)

    def concepts(self) -> List[OLNode]:
        return [self._nodes[k] for k in sorted(self._nodes)]

    def all_senses(self) -> List[Sense]:
        return [self._senses[k] for k in sorted(self._senses)]

    def competencies(self) -> List[CompetencyDescriptor]:
        return [self._competencies[k] for k in sorted(self._competencies)]

    def node_of_sense(self, sense_id: str) -> Optional[str]:
        """Id of the concept a sense is attached to, if any."""
        return self._sense_node.get(sense_id)

    def node_label(self, node_id: str, language: Optional[str] = None) -> str:
        """Human-readable name for a node: its first attached lemma, else id."""
        node = self._nodes.get(node_id)
        if node is None:
            return node_id
        languages = [language] if language else sorted(node.l_layer)
        for lang in languages:
            for sid in node.l_layer.get(lang, ()):
                sense = self._senses.get(sid)
                if sense is not None:
                    return sense.lemma
        return node_id

    def verb_lemmas(self, language: str) -> FrozenSet[str]:
        """Lemmas that head some FrameSet in the given language."""
        return frozenset(
            lemma for (lang, lemma) in self._framesets_by_verb if lang == language
        )

    # -- queries ---------------------------------------------------------

    def senses_of_lemma(self, lemma: str, language: str) -> List[Sense]:
        """All lexicon senses for a lemma, grounded or not, by id."""
        ids = self._lemma_index.get((language, lemma.lower()), [])
        return [self._senses[i] for i in ids]

    def grounded_senses_of_lemma(self, lemma: str, language: str) -> List[Sense]:
        return [s for s in self.senses_of_lemma(lemma, language)
                if s.id in self._sense_node]

    def ask(self, phrase: Sequence[str], language: str) -> List[Sense]:
        """All senses reachable for a phrase, by sense id.

        Determiners are dropped first.  A single remaining word resolves
        through the lemma index to the senses attached to concepts.  A
        multiword phrase tries an exact lexical match on the joined words;
        failing that, it enumerates constituent-sense combinations and
        keeps those where every sense grounds to a concept, offering one
        :class:`CompoundSenseCandidate` per surviving combination.  An
        unknown phrase yields an empty list, never an error.
        """
        if isinstance(phrase, str):
            phrase = phrase.split()
        if not phrase:
            raise ValueError("ask requires a non-empty phrase")
        words = _content_tokens(phrase)
        if not words:
            return []
        if len(words) == 1:
            return self.grounded_senses_of_lemma(words[0], language)
        exact = self.grounded_senses_of_lemma(" ".join(words), language)
        if exact:
            return exact
        candidates = []
        for combo in self.compound_combinations(words, language):
            candidates.append(self._compound_candidate(combo, words))
        candidates.sort(key=lambda s: s.id)
        return candidates

    def compound_combinations(
        self, words: Sequence[str], language: str
    ) -> List[Tuple[Sense, ...]]:
        """Constituent-sense tuples for a compound in which every sense is
        attached to a concept; argument order x sense-id order."""
        per_word = [self.grounded_senses_of_lemma(w, language) for w in words]
        if any(not senses for senses in per_word):
            return []
        return [tuple(combo) for combo in itertools.product(*per_word)]

    def raw_pair_count(self, phrase: Sequence[str], language: str) -> int:
        """Size of the unfiltered sense space for a phrase.

        For a single word (or a multiword phrase with an exact lexical
        match) this is the lexicon sense count; otherwise the product of
        per-word lexicon counts, counting senses whether grounded or not.
        """
        words = _content_tokens(phrase)
        if not words:
            return 0
        if len(words) == 1:
            return len(self.senses_of_lemma(words[0], language))
        exact = self.senses_of_lemma(" ".join(words), language)
        if any(s.id in self._sense_node for s in exact):
            return len(exact)
        counts = [len(self.senses_of_lemma(w, language)) for w in words]
        product = 1
        for c in counts:
            product *= c
        return product

    def _compound_candidate(
        self, combo: Tuple[Sense, ...], words: Sequence[str]
    ) -> Sense:
        sense_id = compound_sense_id([s.id for s in combo])
        existing = self._senses.get(sense_id)
        if existing is not None:
            return existing
        return CompoundSenseCandidate(
            id=sense_id,
            language=combo[0].language,
            lemma=" ".join(w.lower() for w in words),
            part_of_speech=combo[-1].part_of_speech,
            gloss="compound of " + ", ".join(s.lemma for s in combo),
            constituents=combo,
        )

    def framesets_of_verb(self, verb: str, language: str) -> List[FrameSet]:
        ids = self._framesets_by_verb.get((language, verb.lower()), [])
        return [self._framesets[i] for i in ids]

    def find_strategy_association(
        self, sense_id: str
    ) -> Optional[StrategyAssociation]:
        """The unique strategy association for a verb sense, if the sense
        is one the system can act on."""
        assoc_id = self._association_by_sense.get(sense_id)
        return self._associations.get(assoc_id) if assoc_id else None

    def isa_descendant(self, node_id: str, ancestor_id: str) -> bool:
        """True iff ancestor is on the typification chain from node
        (reflexively: every node descends from itself)."""
        current: Optional[str] = node_id
        seen = set()
        while current is not None:
            if current == ancestor_id:
                return True
            if current in seen:  # defensive; loaders reject cycles
                return False
            seen.add(current)
            node = self._nodes.get(current)
            current = node.o_layer.concept_type if node else None
        return False

    @property
    def mutator(self) -> "MutationHandle":
        return self._mutator


class MutationHandle:
    """Serialized write access to a store."""

    def __init__(self, store: MemoryStore):
        self._store = store

    @property
    def store(self) -> MemoryStore:
        return self._store

    def create_compound_concept(self, constituents: Sequence[Sense]) -> OLNode:
        """Create (or fetch) the concept for a compound word.

        The node is keyed by the set of constituent concepts; a phrase
        sense keyed by the exact constituent-sense tuple is attached to
        it.  The node is typified by the type of the head constituent's
        concept (the last constituent).  Calling again with a set-equal
        constituent list returns the same node.
        """
        if len(constituents) < 2:
            raise ValueError("a compound needs at least two constituents")
        store = self._store
        with store._write_lock:
            node_ids = []
            for sense in constituents:
                node_id = store._sense_node.get(sense.id)
                if node_id is None:
                    raise ConstituentUnknown(sense.id)
                node_ids.append(node_id)
            node_key = frozenset(node_ids)
            sense_id = compound_sense_id([s.id for s in constituents])
            language = constituents[0].language
            existing_id = store._compound_by_nodes.get(node_key)
            if existing_id is not None:
                node = store._nodes[existing_id]
                if sense_id not in store._senses:
                    self._attach_phrase_sense(node, sense_id, constituents)
                return store._nodes[existing_id]
            head_node = store._nodes[node_ids[-1]]
            node = OLNode(
                id=compound_node_id(node_ids),
                o_layer=OLayer(concept_type=head_node.o_layer.concept_type),
                l_layer={language: ()},
                compound_of=tuple(node_ids),
            )
            store._nodes[node.id] = node
            store._compound_by_nodes[node_key] = node.id
            self._attach_phrase_sense(node, sense_id, constituents)
            return store._nodes[node.id]

    def _attach_phrase_sense(
        self, node: OLNode, sense_id: str, constituents: Sequence[Sense]
    ) -> None:
        store = self._store
        language = constituents[0].language
        sense = Sense(
            id=sense_id,
            language=language,
            lemma=" ".join(s.lemma for s in constituents),
            part_of_speech=constituents[-1].part_of_speech,
            gloss="compound of " + ", ".join(s.lemma for s in constituents),
        )
        # Insert order matters for lock-free readers: the sense record goes
        # in first and only becomes reachable once the node and the lemma
        # index have been updated.
        store._senses[sense.id] = sense
        updated = dict(node.l_layer)
        updated[language] = tuple(updated.get(language, ())) + (sense.id,)
        store._nodes[node.id] = OLNode(
            id=node.id,
            o_layer=node.o_layer,
            l_layer=updated,
            compound_of=node.compound_of,
        )
        store._sense_node[sense.id] = node.id
        store._index_sense(sense)

    def add_concept_definition(self, definition: ConceptDefinition) -> OLNode:
        """Add a user-defined atomic concept with a fresh attached sense.

        Redefining the same lemma yields a second, distinct node; ask then
        returns both senses (homonyms are allowed).
        """
        store = self._store
        with store._write_lock:
            if definition.concept_type not in store._nodes:
                raise UnknownType(definition.concept_type)
            for relation in definition.relations:
                if relation.target not in store._nodes:
                    raise UnknownRelationTarget(relation.target)
            slug = definition.lemma.lower().replace(" ", "-")
            serial = 1
            while True:
                suffix = "" if serial == 1 else f".{serial}"
                node_id = f"n:def:{slug}{suffix}"
                sense_id = f"s:def:{definition.language}:{slug}{suffix}"
                if node_id not in store._nodes and sense_id not in store._senses:
                    break
                serial += 1
            sense = Sense(
                id=sense_id,
                language=definition.language,
                lemma=definition.lemma.lower(),
                part_of_speech=definition.part_of_speech,
                gloss=definition.gloss or f"user-defined {definition.lemma}",
            )
            node = OLNode(
                id=node_id,
                o_layer=OLayer(
                    concept_type=definition.concept_type,
                    relations=tuple(definition.relations),
                ),
                l_layer={definition.language: (sense.id,)},
            )
            store._senses[sense.id] = sense
            store._nodes[node.id] = node
            store._sense_node[sense.id] = node.id
            store._index_sense(sense)
            return node


def ask(phrase: Sequence[str], language: str, store: MemoryStore) -> List[Sense]:
    return store.ask(phrase, language)


def framesets_of_verb(verb: str, language: str, store: MemoryStore) -> List[FrameSet]:
    return store.framesets_of_verb(verb, language)


def isa_descendant(node_id: str, ancestor_id: str, store: MemoryStore) -> bool:
    return store.isa_descendant(node_id, ancestor_id)
