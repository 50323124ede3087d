"""Imperative utterance parsing over a closed pattern grammar.

Accepted shape: [Vocative-NP] V NP [PP NP]*.  The verb is the first
token matching a known verb lemma; everything is deterministic, so the
same text always yields the same tree.  No morphology: lemmas match by
case-insensitive equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Collection, List, Tuple

DETERMINERS = frozenset({"the", "a", "an"})
PREPOSITIONS = frozenset(
    {"to", "in", "on", "at", "with", "from", "into", "onto", "by"}
)
NUMBER_WORDS = frozenset(
    {
        "zero", "one", "two", "three", "four", "five", "six", "seven",
        "eight", "nine", "ten", "eleven", "twelve", "thirteen", "fourteen",
        "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
        "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
        "hundred", "thousand",
    }
)

_TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9'\-]*")


class ParseError(Exception):
    pass


class NoVerbFound(ParseError):
    def __init__(self, text: str):
        super().__init__(f"no known verb in {text!r}")
        self.text = text


class UnrecognizedShape(ParseError):
    def __init__(self, text: str, reason: str = ""):
        detail = f": {reason}" if reason else ""
        super().__init__(f"cannot parse {text!r}{detail}")
        self.text = text
        self.reason = reason


class Category(str, Enum):
    NP = "NP"
    PP = "PP"
    V = "V"


def _is_number(token: str) -> bool:
    return token.isdigit() or token.lower() in NUMBER_WORDS


@dataclass(frozen=True)
class Constituent:
    """One phrase: full token span plus head/modifier split.

    Determiners stay in the span but never appear as head or modifier.
    A trailing number word modifies the preceding noun (head of
    "motor nine" is "motor").
    """

    category: Category
    tokens: Tuple[str, ...]
    head: str
    modifiers: Tuple[str, ...] = ()

    @property
    def content_tokens(self) -> Tuple[str, ...]:
        return tuple(t for t in self.tokens if t.lower() not in DETERMINERS)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class UtteranceTree:
    verb: str
    verb_index: int  # position of the V constituent
    constituents: Tuple[Constituent, ...]
    language: str
    source_text: str


def tokenize(text: str) -> List[str]:
    return _TOKEN_RE.findall(text)


def _noun_phrase(span: List[str], text: str) -> Constituent:
    content = [t for t in span if t.lower() not in DETERMINERS]
    if not content:
        raise UnrecognizedShape(text, "noun phrase has only determiners")
    head_index = len(content) - 1
    for i in range(len(content) - 1, -1, -1):
        if not _is_number(content[i]):
            head_index = i
            break
    head = content[head_index]
    modifiers = tuple(t for i, t in enumerate(content) if i != head_index)
    return Constituent(
        category=Category.NP, tokens=tuple(span), head=head, modifiers=modifiers
    )


def parse_utterance(
    text: str, language: str, verb_lemmas: Collection[str]
) -> UtteranceTree:
    """Parse an imperative utterance into its constituent tree.

    verb_lemmas is the set of lemmas that can head a FrameSet in this
    language (see MemoryStore.verb_lemmas); the first matching token is
    taken as the verb.
    """
    tokens = tokenize(text)
    if not tokens:
        raise UnrecognizedShape(text, "no tokens")
    known = {v.lower() for v in verb_lemmas}
    verb_pos = next(
        (i for i, t in enumerate(tokens) if t.lower() in known), None
    )
    if verb_pos is None:
        raise NoVerbFound(text)
    constituents: List[Constituent] = []
    if verb_pos > 0:
        constituents.append(_noun_phrase(tokens[:verb_pos], text))
    verb = tokens[verb_pos]
    verb_index = len(constituents)
    constituents.append(
        Constituent(category=Category.V, tokens=(verb,), head=verb)
    )
    current: List[str] = []
    expecting_np = False
    for token in tokens[verb_pos + 1:]:
        if token.lower() in PREPOSITIONS:
            if current:
                constituents.append(_noun_phrase(current, text))
                current = []
            elif expecting_np:
                raise UnrecognizedShape(text, "preposition without object")
            constituents.append(
                Constituent(category=Category.PP, tokens=(token,), head=token)
            )
            expecting_np = True
        else:
            current.append(token)
    if current:
        constituents.append(_noun_phrase(current, text))
    elif expecting_np:
        raise UnrecognizedShape(text, "preposition without object")
    return UtteranceTree(
        verb=verb,
        verb_index=verb_index,
        constituents=tuple(constituents),
        language=language,
        source_text=text,
    )


def verb_of(tree: UtteranceTree) -> str:
    return tree.verb


def args_of(tree: UtteranceTree) -> List[Constituent]:
    """Non-verb constituents in surface order."""
    return [c for c in tree.constituents if c.category is not Category.V]
