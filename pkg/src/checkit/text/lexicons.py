"""Word lists consumed by the stylistic and psychological features.

The bundled lists are small starter lexicons. Full AFINN, Hu & Liu opinion
and moral-foundation dictionaries can be loaded from files with
:func:`load_lexicons`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Union

from ..ingest import LEXICON_KINDS, Lexicon, load_lexicon

NEGATIONS = frozenset(
    ["n't", "not", "never", "no", "none", "nobody", "nothing", "neither", "nor", "nowhere"]
)


class LexiconError(LookupError):
    """A feature needs a lexicon that was not supplied."""


@dataclass(frozen=True)
class LexiconSet:
    stopwords: Optional[Lexicon] = None
    positive: Optional[Lexicon] = None
    negative: Optional[Lexicon] = None
    moral: Optional[Lexicon] = None
    afinn: Optional[Lexicon] = None
    negations: frozenset = NEGATIONS

    def require(self, name: str) -> Lexicon:
        lex = getattr(self, name)
        if lex is None:
            raise LexiconError(f"lexicon {name!r} is not loaded")
        return lex


_ATTR = {
    "stopwords": "stopwords",
    "positive-opinion": "positive",
    "negative-opinion": "negative",
    "moral-foundation": "moral",
    "afinn": "afinn",
}


def _bundled(kind: str) -> Lexicon:
    data = resources.files("checkit.data").joinpath(f"{kind}.txt").read_bytes()
    return load_lexicon(kind, data)


@lru_cache(maxsize=1)
def default_lexicons() -> LexiconSet:
    return LexiconSet(**{_ATTR[k]: _bundled(k) for k in LEXICON_KINDS})


def load_lexicons(paths: Mapping[str, Union[str, Path]], base: Optional[LexiconSet] = None) -> LexiconSet:
    """Override lexicons of ``base`` (default: bundled) with files keyed by kind."""
    base = base or default_lexicons()
    fields = {a: getattr(base, a) for a in _ATTR.values()}
    for kind, path in paths.items():
        if kind not in _ATTR:
            raise LexiconError(f"unknown lexicon kind {kind!r}")
        fields[_ATTR[kind]] = load_lexicon(kind, Path(path).read_bytes())
    return LexiconSet(negations=base.negations, **fields)
