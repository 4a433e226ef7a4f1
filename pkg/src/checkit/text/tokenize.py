"""Sentence splitting, tokenization and per-token annotation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

TERMINALS = frozenset(".!?")

_TOKEN = re.compile(
    r"""
    [^\W\d_]+(?=n['’]t\b)          # stem of a negated auxiliary ("do" in "don't")
  | n['’]t\b
  | ['’](?:s|re|ve|ll|d|m)\b       # clitics
  | \.\.\.|…
  | \w+(?:[-.]\w+)*                # words, numbers, hyphenated compounds
  | [^\w\s]
    """,
    re.VERBOSE | re.IGNORECASE,
)
_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_HAS_WORD = re.compile(r"\w")


@dataclass
class Token:
    text: str
    start: int
    lower: str
    casing: str
    is_punct: bool
    is_alpha: bool
    syllables: int
    is_stopword: bool = False
    pos: Optional[str] = None


@dataclass
class TokenizedText:
    raw: str
    lines: int
    sentences: list[list[Token]] = field(default_factory=list)

    @property
    def tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s]

    @property
    def words(self) -> list[Token]:
        return [t for s in self.sentences for t in s if t.is_alpha]


def casing_class(token: str) -> str:
    letters = [c for c in token if c.isalpha()]
    if not letters:
        return "other"
    if all(c.isupper() for c in letters):
        # single capital letters ("I", "A") read as initial caps
        return "initial-cap" if len(letters) == 1 else "all-caps"
    if letters[0].isupper() and all(c.islower() for c in letters[1:]):
        return "initial-cap"
    if all(c.islower() for c in letters):
        return "lower"
    return "other"


def count_syllables(word: str) -> int:
    """Vowel-group syllable estimate, never below 1.

    Each run of ``aeiouy`` counts once; a trailing silent ``e`` is dropped
    unless it forms the only group.
    """
    w = "".join(c for c in word.lower() if c.isalpha())
    groups = _VOWEL_GROUP.findall(w)
    n = len(groups)
    if n > 1 and w.endswith("e") and groups[-1] == "e":
        n -= 1
    return max(n, 1)


def _make_token(text: str, start: int) -> Token:
    alpha = any(c.isalpha() for c in text)  # regex \w admits "²" and other No digits
    return Token(
        text=text,
        start=start,
        lower=text.lower().replace("’", "'"),
        casing=casing_class(text),
        is_punct=not _HAS_WORD.search(text),
        is_alpha=alpha,
        syllables=count_syllables(text) if alpha else 0,
    )


def count_lines(text: str) -> int:
    return 0 if not text else 1 + text.count("\n")


def tokenize(text: str, stopwords=None) -> TokenizedText:
    """Split ``text`` into sentences of annotated tokens.

    A sentence ends at ``.``, ``!`` or ``?`` followed by whitespace or the
    end of the text. Punctuation-only fragments are attached to the previous
    sentence so that every sentence contains a word.
    """
    out = TokenizedText(raw=text, lines=count_lines(text))
    if not _HAS_WORD.search(text):
        return out
    current: list[Token] = []
    sentences: list[list[Token]] = []
    n = len(text)
    for m in _TOKEN.finditer(text):
        tok = _make_token(m.group(), m.start())
        if stopwords is not None:
            tok.is_stopword = tok.lower in stopwords
        current.append(tok)
        end = m.end()
        if tok.text in TERMINALS and (end == n or text[end].isspace()):
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    merged: list[list[Token]] = []
    for s in sentences:
        if any(not t.is_punct for t in s) or not merged:
            merged.append(s)
        else:
            merged[-1].extend(s)
    if merged and all(t.is_punct for t in merged[0]) and len(merged) > 1:
        merged[1] = merged[0] + merged[1]
        merged.pop(0)
    out.sentences = merged
    return out
