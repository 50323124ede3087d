from __future__ import annotations

import pytest

from frameground.parsing import (
    Category,
    NoVerbFound,
    UnrecognizedShape,
    args_of,
    parse_utterance,
    tokenize,
    verb_of,
)

VERBS = {"find", "start", "put", "do"}


def cats(tree):
    return [c.category for c in tree.constituents]


def test_vocative_verb_object():
    tree = parse_utterance("Jacob find the blue ball", "en", VERBS)
    assert verb_of(tree) == "find"
    assert cats(tree) == [Category.NP, Category.V, Category.NP]
    vocative, theme = args_of(tree)
    assert vocative.tokens == ("Jacob",)
    assert theme.tokens == ("the", "blue", "ball")
    assert theme.content_tokens == ("blue", "ball")
    assert theme.head == "ball"
    assert theme.modifiers == ("blue",)


def test_bare_imperative_without_vocative():
    tree = parse_utterance("find the ball", "en", VERBS)
    assert tree.verb_index == 0
    assert cats(tree) == [Category.V, Category.NP]


def test_number_word_modifies_preceding_noun():
    tree = parse_utterance("Jacob start motor nine", "en", VERBS)
    theme = args_of(tree)[1]
    assert theme.head == "motor"
    assert theme.modifiers == ("nine",)
    assert theme.text == "motor nine"


def test_prepositional_arguments_become_separate_phrases():
    tree = parse_utterance("put the ball in the box", "en", VERBS)
    assert cats(tree) == [
        Category.V, Category.NP, Category.PP, Category.NP,
    ]
    pp = tree.constituents[2]
    assert pp.head == "in"
    assert tree.constituents[3].head == "box"


def test_verb_matching_is_case_insensitive():
    tree = parse_utterance("Jacob FIND the ball", "en", VERBS)
    assert verb_of(tree) == "FIND"
    assert tree.verb_index == 1


def test_no_verb_raises():
    with pytest.raises(NoVerbFound):
        parse_utterance("the blue ball", "en", VERBS)
    with pytest.raises(NoVerbFound):
        parse_utterance("quickly", "en", set())


def test_empty_and_determiner_only_shapes_raise():
    with pytest.raises(UnrecognizedShape):
        parse_utterance("...", "en", VERBS)
    with pytest.raises(UnrecognizedShape):
        parse_utterance("the find", "en", VERBS)


def test_trailing_preposition_raises():
    with pytest.raises(UnrecognizedShape) as info:
        parse_utterance("put the ball in", "en", VERBS)
    assert "preposition" in info.value.reason


def test_double_preposition_raises():
    with pytest.raises(UnrecognizedShape):
        parse_utterance("put the ball in on the box", "en", VERBS)


def test_tokenize_keeps_contractions_and_hyphens():
    assert tokenize("find the well-worn o'clock ball!") == [
        "find", "the", "well-worn", "o'clock", "ball",
    ]


def test_same_text_same_tree():
    one = parse_utterance("Jacob find the blue ball", "en", VERBS)
    two = parse_utterance("Jacob find the blue ball", "en", VERBS)
    assert one == two


def test_duplicate_tokens_keep_last_as_head():
    tree = parse_utterance("find the ball ball", "en", VERBS)
    theme = args_of(tree)[0]
    assert theme.head == "ball"
    assert theme.modifiers == ("ball",)
