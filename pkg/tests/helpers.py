"""Shared builders for the test suite.

Two randomized generators back the property suites: lexicon_case builds
a KB of known lexicon shape for checking sense-combination counts
against a brute-force product, resume_case builds a KB with one unknown
word plus the definition that repairs it.  corrupt_kb seeds structural
damage into a copy of a healthy KB directory.
"""

from __future__ import annotations

import itertools
import json
import random
import shutil
from pathlib import Path
from typing import Callable, Dict, List, Tuple

from frameground.kbio import write_knowledge_base
from frameground.model import (
    CompetencyAction,
    CompetencyDescriptor,
    ConceptDefinition,
    ExecutionStrategy,
    Frame,
    FrameSet,
    OLNode,
    OLayer,
    ORelation,
    PartOfSpeech,
    Restriction,
    RestrictionKind,
    Sense,
    StrategyAssociation,
    TemplateStep,
    compound_sense_id,
)

ROOT = Path(__file__).resolve().parent.parent
JACOB_KB = ROOT / "fixtures" / "jacob"
MOTORS_KB = ROOT / "fixtures" / "motors"
SCENARIOS = ROOT / "scenarios"

_PREPOSITIONS = ("to", "with", "from")


def lexicon_case(
    rng: random.Random, path: Path
) -> Tuple[str, List[List[str]]]:
    """Build a random lexicon KB and the brute-force expectations for it.

    Returns (utterance, expected) where expected[i] lists, sorted by id,
    every sense id the i-th noun phrase of the utterance can resolve to.
    Grounded sense counts are the generator's own bookkeeping, so the
    product over expected is an oracle independent of the store.
    """
    n_args = rng.randint(1, 4)
    senses: List[Sense] = []
    nodes: List[OLNode] = [OLNode(id="n:thing", o_layer=OLayer(None))]
    counter = itertools.count()

    def add_word() -> Tuple[str, List[str]]:
        word = f"w{next(counter)}"
        grounded = rng.randint(1, 5)
        ids = []
        for k in range(1, grounded + 1):
            sense_id = f"s:en:{word}.{k}"
            node_id = f"n:{word}-{k}"
            senses.append(Sense(
                id=sense_id, language="en", lemma=word,
                part_of_speech=PartOfSpeech.NOUN,
            ))
            nodes.append(OLNode(
                id=node_id, o_layer=OLayer("n:thing"),
                l_layer={"en": (sense_id,)},
            ))
            ids.append(sense_id)
        # lexicon noise: senses with no concept, must never combine
        for k in range(grounded + 1, grounded + 1 + rng.randint(0, 2)):
            senses.append(Sense(
                id=f"s:en:{word}.{k}", language="en", lemma=word,
                part_of_speech=PartOfSpeech.NOUN, gloss="unused reading",
            ))
        return word, sorted(ids)

    phrases: List[str] = []
    expected: List[List[str]] = []
    for _ in range(n_args):
        if rng.random() < 0.3:
            w1, ids1 = add_word()
            w2, ids2 = add_word()
            phrases.append(f"{w1} {w2}")
            expected.append(sorted(
                compound_sense_id([a, b])
                for a, b in itertools.product(ids1, ids2)
            ))
        else:
            word, ids = add_word()
            phrases.append(word)
            expected.append(ids)

    write_knowledge_base(path, languages=["en"], senses=senses, nodes=nodes)
    utterance = f"{phrases[0]} v"
    if n_args > 1:
        utterance += f" {phrases[1]}"
    for i, phrase in enumerate(phrases[2:]):
        utterance += f" {_PREPOSITIONS[i]} {phrase}"
    return utterance, expected


def resume_case(
    rng: random.Random, path: Path
) -> Tuple[str, ConceptDefinition, int]:
    """Build a KB with one unknown word and the definition repairing it.

    Returns (utterance, definition, expected_plan_count).  The expected
    count is derived from the generator's own choice of restriction
    target versus definition type, not from the engine.
    """
    unknown = f"zz{rng.randint(0, 9999)}"
    definition_type = rng.choice(["n:kind-a", "n:kind-b"])
    restriction_target = rng.choice(["n:thing", "n:kind-a"])
    relations: Tuple[ORelation, ...] = ()
    if rng.random() < 0.5:
        relations = (ORelation("marked-by", "n:marker"),)
    restrictions = [Restriction("Theme", RestrictionKind.IS_A,
                                restriction_target)]
    if rng.random() < 0.3:
        restrictions.append(Restriction(
            "Theme", RestrictionKind.HAS_RELATION, "n:marker",
            relation="marked-by",
        ))
    unknown_is_agent = rng.random() < 0.25

    senses = [
        Sense(id="s:en:agent.1", language="en", lemma="agent",
              part_of_speech=PartOfSpeech.NOUN),
        Sense(id="s:en:do.1", language="en", lemma="do",
              part_of_speech=PartOfSpeech.VERB, gloss="carry out"),
    ]
    if rng.random() < 0.5:
        senses.append(Sense(
            id=f"s:en:{unknown}.9", language="en", lemma=unknown,
            part_of_speech=PartOfSpeech.NOUN, gloss="archaic reading",
        ))
    nodes = [
        OLNode(id="n:thing", o_layer=OLayer(None)),
        OLNode(id="n:kind-a", o_layer=OLayer("n:thing")),
        OLNode(id="n:kind-b", o_layer=OLayer("n:thing")),
        OLNode(id="n:marker", o_layer=OLayer("n:thing")),
        OLNode(id="n:agent", o_layer=OLayer("n:thing"),
               l_layer={"en": ("s:en:agent.1",)}),
    ]
    write_knowledge_base(
        path,
        languages=["en"],
        senses=senses,
        nodes=nodes,
        frames=[Frame("f:np-v-np", ("NP", "V", "NP"),
                      ("Agent", "V", "Theme"))],
        framesets=[FrameSet("fs:en:do", "do", "en",
                            ("f:np-v-np",), ("s:en:do.1",))],
        associations=[StrategyAssociation("a:do.1", "s:en:do.1", ("es:act",))],
        strategies=[ExecutionStrategy(
            "es:act", "act on theme",
            restrictions=tuple(restrictions),
            plan_template=(TemplateStep(
                "c:actuator", "act", (("target", "Theme"),)
            ),),
        )],
        competencies=[CompetencyDescriptor(
            "c:actuator", "actuator",
            actions=(CompetencyAction("act", ("target",)),),
            results=("done",),
        )],
    )
    definition = ConceptDefinition(
        lemma=unknown, language="en", concept_type=definition_type,
        relations=relations,
    )
    if unknown_is_agent:
        utterance = f"{unknown} do the agent"
        theme_ancestry = {"n:agent", "n:thing"}
        theme_relations: Tuple[ORelation, ...] = ()
    else:
        utterance = f"agent do the {unknown}"
        theme_ancestry = {definition_type, "n:thing"}
        theme_relations = relations
    satisfied = restriction_target in theme_ancestry
    for restriction in restrictions[1:]:
        satisfied = satisfied and any(
            r.kind == restriction.relation and r.target == restriction.target
            for r in theme_relations
        )
    return utterance, definition, 1 if satisfied else 0


# -- corruption seeding -------------------------------------------------

_JSONL_FILES = (
    "senses.jsonl", "concepts.jsonl", "frames.jsonl", "framesets.jsonl",
    "alphas.jsonl", "strategies.jsonl", "competencies.jsonl",
)


def _read_records(kb: Path) -> Dict[str, List[dict]]:
    out = {}
    for name in _JSONL_FILES:
        file = kb / name
        out[name] = [
            json.loads(line)
            for line in file.read_text("utf-8").splitlines() if line
        ]
    return out


def _write_records(records: Dict[str, List[dict]], src: Path,
                   dst: Path) -> None:
    dst.mkdir(parents=True, exist_ok=True)
    shutil.copy(src / "manifest", dst / "manifest")
    for name, rows in records.items():
        (dst / name).write_text(
            "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows),
            "utf-8",
        )


def _non_root_concepts(records) -> List[dict]:
    return [r for r in records["concepts.jsonl"]
            if r["o_layer"]["concept_type"] is not None]


def _c_dangling_sense_relation(records) -> None:
    records["senses.jsonl"][0]["relations"] = [["hypernym", "s:en:ghost.1"]]


def _c_dangling_l_layer(records) -> None:
    node = next(r for r in records["concepts.jsonl"] if r.get("l_layer"))
    tag = sorted(node["l_layer"])[0]
    node["l_layer"][tag] = list(node["l_layer"][tag]) + ["s:en:ghost.2"]


def _c_dangling_concept_type(records) -> None:
    _non_root_concepts(records)[0]["o_layer"]["concept_type"] = "n:ghost"


def _c_dangling_frameset_frame(records) -> None:
    records["framesets.jsonl"][0]["frames"] = ["f:ghost"]


def _c_dangling_frameset_verb_sense(records) -> None:
    records["framesets.jsonl"][0]["verb_senses"] = ["s:en:ghost.3"]


def _c_dangling_alpha_strategy(records) -> None:
    records["alphas.jsonl"][0]["strategies"] = ["es:ghost"]


def _c_dangling_restriction_target(records) -> None:
    strategy = next(r for r in records["strategies.jsonl"]
                    if r.get("restrictions"))
    strategy["restrictions"][0]["predicate"] = ["is_a", "n:ghost"]


def _c_dangling_template_competency(records) -> None:
    strategy = next(r for r in records["strategies.jsonl"]
                    if r.get("plan_template"))
    strategy["plan_template"][0][0] = "c:ghost"


def _c_typification_cycle(records) -> None:
    a, b = _non_root_concepts(records)[:2]
    a["o_layer"]["concept_type"] = b["id"]
    b["o_layer"]["concept_type"] = a["id"]


def _c_hypernym_cycle(records) -> None:
    a, b = records["senses.jsonl"][:2]
    a["relations"] = [["hypernym", b["id"]]]
    b["relations"] = [["hypernym", a["id"]]]


def _c_duplicate_sense_id(records) -> None:
    records["senses.jsonl"].append(dict(records["senses.jsonl"][0]))


def _c_duplicate_concept_id(records) -> None:
    records["concepts.jsonl"].append(dict(records["concepts.jsonl"][0]))


CORRUPTIONS: Dict[str, Callable[[Dict[str, List[dict]]], None]] = {
    "dangling-sense-relation": _c_dangling_sense_relation,
    "dangling-l-layer-sense": _c_dangling_l_layer,
    "dangling-concept-type": _c_dangling_concept_type,
    "dangling-frameset-frame": _c_dangling_frameset_frame,
    "dangling-frameset-verb-sense": _c_dangling_frameset_verb_sense,
    "dangling-alpha-strategy": _c_dangling_alpha_strategy,
    "dangling-restriction-target": _c_dangling_restriction_target,
    "dangling-template-competency": _c_dangling_template_competency,
    "typification-cycle": _c_typification_cycle,
    "hypernym-cycle": _c_hypernym_cycle,
    "duplicate-sense-id": _c_duplicate_sense_id,
    "duplicate-concept-id": _c_duplicate_concept_id,
}


def corrupt_kb(src: Path, dst: Path, name: str) -> Path:
    """Copy the KB at src to dst with one named corruption applied."""
    records = _read_records(src)
    CORRUPTIONS[name](records)
    _write_records(records, src, dst)
    return dst
