"""Regenerate the shipped KB fixtures.

Run from the repository root:

    python scripts/build_fixtures.py

Writes fixtures/jacob (the discovery scenario: 8 blue senses x 12 ball
senses, one grounded combination) and fixtures/motors (the ambiguity
scenario: two motors answering to "motor nine").
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from frameground.kbio import write_knowledge_base
from frameground.model import (
    CompetencyAction,
    CompetencyDescriptor,
    ExecutionStrategy,
    Frame,
    FrameSet,
    OLayer,
    OLNode,
    PartOfSpeech,
    Restriction,
    RestrictionKind,
    Sense,
    SenseRelation,
    SenseRelationKind,
    StrategyAssociation,
    TemplateStep,
)

NOUN = PartOfSpeech.NOUN
VERB = PartOfSpeech.VERB
ADJ = PartOfSpeech.ADJECTIVE

BLUE_GLOSSES = [
    "of the color of the clear daytime sky",
    "feeling sad or low in spirits",
    "suggestive of sexual impropriety",
    "bruised or livid in color",
    "holding puritanical or strict standards",
    "of noble or aristocratic descent",
    "the hue between green and violet",
    "a dye or pigment of this hue",
]

BALL_GLOSSES = [
    "a round object used in games",
    "a solid projectile shot from a cannon",
    "a lavish formal dance",
    "a very enjoyable time",
    "the game of baseball",
    "a pitch outside the strike zone",
    "a spherical or roughly round body",
    "the rounded prominence of the foot or hand",
    "a testis",
    "courage or nerve",
    "material formed into a round mass",
    "a unit of yarn wound into a sphere",
]


def _senses_for(lemma, glosses, pos_first, pos_rest):
    out = []
    for i, gloss in enumerate(glosses, start=1):
        out.append(Sense(
            id=f"s:en:{lemma.replace(' ', '_')}.{i}",
            language="en",
            lemma=lemma,
            part_of_speech=pos_first if i == 1 else pos_rest,
            gloss=gloss,
        ))
    return out


def build_jacob(path) -> None:
    blue = _senses_for("blue", BLUE_GLOSSES, ADJ, ADJ)
    ball = _senses_for("ball", BALL_GLOSSES, NOUN, NOUN)
    red = _senses_for(
        "red",
        ["of the color of fresh blood", "politically radical"],
        ADJ, ADJ,
    )
    singles = [
        Sense(id="s:en:jacob.1", language="en", lemma="jacob",
              part_of_speech=NOUN,
              gloss="the agent itself, addressed by name"),
        Sense(id="s:en:person.1", language="en", lemma="person",
              part_of_speech=NOUN, gloss="a human being"),
        Sense(id="s:en:physical_object.1", language="en",
              lemma="physical object", part_of_speech=NOUN,
              gloss="a tangible thing occupying space"),
        Sense(id="s:en:color.1", language="en", lemma="color",
              part_of_speech=NOUN,
              gloss="a visual property of reflected light"),
        Sense(id="s:en:find.1", language="en", lemma="find",
              part_of_speech=VERB,
              gloss="come upon after searching; discover the location of"),
        Sense(id="s:en:find.2", language="en", lemma="find",
              part_of_speech=VERB,
              gloss="come into possession of; acquire"),
    ]
    ball[0] = Sense(
        id=ball[0].id, language="en", lemma="ball", part_of_speech=NOUN,
        gloss=ball[0].gloss,
        relations=(SenseRelation(SenseRelationKind.HYPERNYM,
                                 "s:en:physical_object.1"),),
    )
    nodes = [
        OLNode(id="n:physical-object", o_layer=OLayer(concept_type=None),
               l_layer={"en": ("s:en:physical_object.1",)}),
        OLNode(id="n:color", o_layer=OLayer(concept_type=None),
               l_layer={"en": ("s:en:color.1",)}),
        OLNode(id="n:person",
               o_layer=OLayer(concept_type="n:physical-object"),
               l_layer={"en": ("s:en:person.1",)}),
        OLNode(id="n:ball",
               o_layer=OLayer(concept_type="n:physical-object"),
               l_layer={"en": ("s:en:ball.1",)}),
        OLNode(id="n:blue", o_layer=OLayer(concept_type="n:color"),
               l_layer={"en": ("s:en:blue.1",)}),
        OLNode(id="n:red", o_layer=OLayer(concept_type="n:color"),
               l_layer={"en": ("s:en:red.1",)}),
        OLNode(id="n:jacob", o_layer=OLayer(concept_type="n:person"),
               l_layer={"en": ("s:en:jacob.1",)}),
    ]
    frames = [Frame(id="f:np-v-np",
                    structural_pattern=("NP", "V", "NP"),
                    semantic_roles=("Agent", "V", "Theme"))]
    framesets = [FrameSet(
        id="fs:en:find", verb_lemma="find", language="en",
        frames=("f:np-v-np",),
        verb_senses=("s:en:find.1", "s:en:find.2"),
    )]
    associations = [StrategyAssociation(
        id="a:find.1", verb_sense="s:en:find.1",
        strategies=("es:person-search", "es:colored-ball-search"),
    )]
    strategies = [
        ExecutionStrategy(
            id="es:person-search",
            name="locate person",
            restrictions=(
                Restriction(role="Theme", kind=RestrictionKind.IS_A,
                            target="n:person"),
            ),
            required_competencies=("c:person-locator",),
            plan_template=(TemplateStep(
                competency="c:person-locator", action="locate",
                bindings=(("target", "Theme"),),
            ),),
        ),
        ExecutionStrategy(
            id="es:colored-ball-search",
            name="search colored objects",
            restrictions=(
                Restriction(role="Theme", kind=RestrictionKind.IS_A,
                            target="n:physical-object"),
                Restriction(role="Theme",
                            kind=RestrictionKind.COMPETENCY_AVAILABLE,
                            target="c:colored-ball-detector"),
            ),
            required_competencies=("c:colored-ball-detector",),
            plan_template=(TemplateStep(
                competency="c:colored-ball-detector", action="search",
                bindings=(("target", "Theme"),),
            ),),
        ),
    ]
    competencies = [
        CompetencyDescriptor(
            id="c:person-locator", name="person locator",
            actions=(CompetencyAction("locate", ("target",)),),
            results=("located", "not-located"),
        ),
        CompetencyDescriptor(
            id="c:colored-ball-detector", name="colored ball detector",
            actions=(CompetencyAction("search", ("target",)),),
            results=("found", "not-found"),
        ),
    ]
    write_knowledge_base(
        path, languages=["en"],
        senses=blue + ball + red + singles,
        nodes=nodes, frames=frames, framesets=framesets,
        associations=associations, strategies=strategies,
        competencies=competencies,
    )


def build_motors(path) -> None:
    senses = [
        Sense(id="s:en:jacob.1", language="en", lemma="jacob",
              part_of_speech=NOUN,
              gloss="the agent itself, addressed by name"),
        Sense(id="s:en:person.1", language="en", lemma="person",
              part_of_speech=NOUN, gloss="a human being"),
        Sense(id="s:en:physical_object.1", language="en",
              lemma="physical object", part_of_speech=NOUN,
              gloss="a tangible thing occupying space"),
        Sense(id="s:en:machine.1", language="en", lemma="machine",
              part_of_speech=NOUN,
              gloss="a powered apparatus doing work"),
        Sense(id="s:en:motor.1", language="en", lemma="motor",
              part_of_speech=NOUN,
              gloss="a machine converting power into motion"),
        Sense(id="s:en:internal_motor.1", language="en",
              lemma="internal motor", part_of_speech=NOUN,
              gloss="a motor housed inside the agent's body"),
        Sense(id="s:en:external_motor.1", language="en",
              lemma="external motor", part_of_speech=NOUN,
              gloss="a motor mounted outside the agent's body"),
        Sense(id="s:en:motor_nine.1", language="en", lemma="motor nine",
              part_of_speech=NOUN,
              gloss="the drive motor labeled nine inside the torso"),
        Sense(id="s:en:motor_nine.2", language="en", lemma="motor nine",
              part_of_speech=NOUN,
              gloss="the auxiliary motor labeled nine on the charging dock"),
        Sense(id="s:en:start.1", language="en", lemma="start",
              part_of_speech=VERB,
              gloss="cause a device to operate"),
        Sense(id="s:en:start.2", language="en", lemma="start",
              part_of_speech=VERB,
              gloss="begin an activity or process"),
    ]
    nodes = [
        OLNode(id="n:physical-object", o_layer=OLayer(concept_type=None),
               l_layer={"en": ("s:en:physical_object.1",)}),
        OLNode(id="n:person",
               o_layer=OLayer(concept_type="n:physical-object"),
               l_layer={"en": ("s:en:person.1",)}),
        OLNode(id="n:jacob", o_layer=OLayer(concept_type="n:person"),
               l_layer={"en": ("s:en:jacob.1",)}),
        OLNode(id="n:machine",
               o_layer=OLayer(concept_type="n:physical-object"),
               l_layer={"en": ("s:en:machine.1",)}),
        OLNode(id="n:motor", o_layer=OLayer(concept_type="n:machine"),
               l_layer={"en": ("s:en:motor.1",)}),
        OLNode(id="n:internal-motor", o_layer=OLayer(concept_type="n:motor"),
               l_layer={"en": ("s:en:internal_motor.1",)}),
        OLNode(id="n:external-motor", o_layer=OLayer(concept_type="n:motor"),
               l_layer={"en": ("s:en:external_motor.1",)}),
        OLNode(id="n:motor-nine-int",
               o_layer=OLayer(concept_type="n:internal-motor"),
               l_layer={"en": ("s:en:motor_nine.1",)}),
        OLNode(id="n:motor-nine-ext",
               o_layer=OLayer(concept_type="n:external-motor"),
               l_layer={"en": ("s:en:motor_nine.2",)}),
    ]
    frames = [Frame(id="f:np-v-np",
                    structural_pattern=("NP", "V", "NP"),
                    semantic_roles=("Agent", "V", "Theme"))]
    framesets = [FrameSet(
        id="fs:en:start", verb_lemma="start", language="en",
        frames=("f:np-v-np",),
        verb_senses=("s:en:start.1", "s:en:start.2"),
    )]
    associations = [StrategyAssociation(
        id="a:start.1", verb_sense="s:en:start.1",
        strategies=("es:internal-motor-start", "es:external-motor-start"),
    )]
    strategies = [
        ExecutionStrategy(
            id="es:internal-motor-start",
            name="spin up internal motor",
            restrictions=(
                Restriction(role="Theme", kind=RestrictionKind.IS_A,
                            target="n:internal-motor"),
                Restriction(role="Theme",
                            kind=RestrictionKind.COMPETENCY_AVAILABLE,
                            target="c:internal-motor-control"),
            ),
            required_competencies=("c:internal-motor-control",),
            plan_template=(TemplateStep(
                competency="c:internal-motor-control", action="start",
                bindings=(("unit", "Theme"),),
            ),),
        ),
        ExecutionStrategy(
            id="es:external-motor-start",
            name="energize external motor",
            restrictions=(
                Restriction(role="Theme", kind=RestrictionKind.IS_A,
                            target="n:external-motor"),
                Restriction(role="Theme",
                            kind=RestrictionKind.COMPETENCY_AVAILABLE,
                            target="c:external-motor-relay"),
            ),
            required_competencies=("c:external-motor-relay",),
            plan_template=(TemplateStep(
                competency="c:external-motor-relay", action="start",
                bindings=(("unit", "Theme"),),
            ),),
        ),
    ]
    competencies = [
        CompetencyDescriptor(
            id="c:internal-motor-control", name="internal motor control",
            actions=(CompetencyAction("start", ("unit",)),
                     CompetencyAction("stop", ("unit",))),
            results=("started", "fault"),
        ),
        CompetencyDescriptor(
            id="c:external-motor-relay", name="external motor relay",
            actions=(CompetencyAction("start", ("unit",)),),
            results=("started", "fault"),
        ),
    ]
    write_knowledge_base(
        path, languages=["en"],
        senses=senses, nodes=nodes, frames=frames, framesets=framesets,
        associations=associations, strategies=strategies,
        competencies=competencies,
    )


def main() -> None:
    root = pathlib.Path(__file__).resolve().parents[1]
    build_jacob(root / "fixtures" / "jacob")
    build_motors(root / "fixtures" / "motors")
    print(f"wrote {root / 'fixtures' / 'jacob'}")
    print(f"wrote {root / 'fixtures' / 'motors'}")


if __name__ == "__main__":
    main()
