from __future__ import annotations

from collections import Counter

from hypothesis import given, settings, strategies as st

from frameground.kbio import load_knowledge_base
from frameground.model import compound_node_id, compound_sense_id, content_hash
from frameground.parsing import (
    DETERMINERS,
    Category,
    parse_utterance,
    tokenize,
)

from helpers import JACOB_KB, MOTORS_KB

MOTORS = load_knowledge_base(MOTORS_KB)  # read-only in this module

_WORDS = st.sampled_from(["ball", "blue", "red", "box", "motor", "jacob"])
_DETS = st.sampled_from(["the", "a", "an"])
_NUMBERS = st.sampled_from(["nine", "two", "7"])
_PREPS = st.sampled_from(["in", "on", "with", "to"])


@st.composite
def noun_phrase(draw):
    tokens = draw(st.lists(st.one_of(_WORDS, _DETS, _NUMBERS), max_size=3))
    tokens.append(draw(_WORDS))
    if draw(st.booleans()):
        tokens.append(draw(_NUMBERS))
    return tokens


@st.composite
def utterance(draw):
    tokens = []
    if draw(st.booleans()):
        tokens += draw(noun_phrase())
    tokens.append("find")
    tokens += draw(noun_phrase())
    for _ in range(draw(st.integers(0, 2))):
        tokens.append(draw(_PREPS))
        tokens += draw(noun_phrase())
    return " ".join(tokens)


@given(utterance())
def test_parse_is_deterministic_and_covers_every_token(text):
    tree = parse_utterance(text, "en", {"find"})
    again = parse_utterance(text, "en", {"find"})
    assert tree == again
    flat = [t for c in tree.constituents for t in c.tokens]
    assert flat == tokenize(text)
    assert tree.constituents[tree.verb_index].category is Category.V


@given(utterance())
def test_noun_phrase_heads_and_modifiers_partition_content(text):
    tree = parse_utterance(text, "en", {"find"})
    for constituent in tree.constituents:
        if constituent.category is not Category.NP:
            continue
        content = list(constituent.content_tokens)
        assert constituent.head.lower() not in DETERMINERS
        assert Counter(constituent.modifiers) + Counter([constituent.head]) \
            == Counter(content)
        # a number can head a phrase only when nothing else is there
        if any(not t.isdigit() and t not in ("nine", "two") for t in content):
            assert constituent.head not in ("nine", "two", "7")


def _ancestors(store, node_id):
    seen = []
    current = node_id
    while current is not None and current not in seen:
        seen.append(current)
        node = store.node(current)
        current = node.o_layer.concept_type if node else None
    return seen


_MOTOR_NODES = st.sampled_from([n.id for n in MOTORS.concepts()])


@given(_MOTOR_NODES, _MOTOR_NODES)
def test_isa_matches_the_typification_walk(a, b):
    assert MOTORS.isa_descendant(a, b) == (b in _ancestors(MOTORS, a))


@given(_MOTOR_NODES, _MOTOR_NODES, _MOTOR_NODES)
def test_isa_is_a_partial_order(a, b, c):
    assert MOTORS.isa_descendant(a, a)
    if MOTORS.isa_descendant(a, b) and MOTORS.isa_descendant(b, a):
        assert a == b
    if MOTORS.isa_descendant(a, b) and MOTORS.isa_descendant(b, c):
        assert MOTORS.isa_descendant(a, c)


@settings(max_examples=25, deadline=None)
@given(st.permutations(["s:en:blue.1", "s:en:ball.1", "s:en:red.1"]),
       st.integers(1, 3))
def test_compound_node_is_order_free_and_idempotent(order, repeats):
    store = load_knowledge_base(JACOB_KB)
    senses = [store.sense(sid) for sid in order]
    nodes = set()
    for _ in range(repeats):
        nodes.add(store.mutator.create_compound_concept(senses).id)
    assert nodes == {compound_node_id(
        [store.node_of_sense(sid) for sid in order]
    )}
    node = store.node(nodes.pop())
    # one phrase sense for this word order, no duplicates from repeats
    assert list(node.senses_for("en")) == [compound_sense_id(order)]
    assert store.raw_pair_count(
        [store.sense(sid).lemma for sid in order], "en") >= 1


@given(st.dictionaries(st.text(min_size=1, max_size=5),
                       st.integers(), min_size=1, max_size=5))
def test_content_hash_ignores_key_order(payload):
    items = list(payload.items())
    forward = dict(items)
    backward = dict(reversed(items))
    assert content_hash(forward) == content_hash(backward)
    changed = dict(items)
    first_key = items[0][0]
    changed[first_key] = items[0][1] + 1
    assert content_hash(changed) != content_hash(forward)
