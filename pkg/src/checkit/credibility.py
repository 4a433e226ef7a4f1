"""Domain flag-list matching and fact-check lookup."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .ingest import Article, FactCheckEntry, FlagListEntry
from .urls import URLError, normalize_domain, normalize_url

__all__ = [
    "FlagIndex", "MatchResult", "normalize_domain", "normalize_url",
    "match_flaglist", "factcheck_lookup", "jaccard", "title_tokens",
]

_WORD = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    entry: Union[FlagListEntry, FactCheckEntry, None] = None
    match_kind: Optional[str] = None
    similarity: Optional[float] = None

    def to_dict(self) -> dict:
        out: dict = {"matched": self.matched, "match_kind": self.match_kind}
        if self.similarity is not None:
            out["similarity"] = self.similarity
        if isinstance(self.entry, FlagListEntry):
            out["entry"] = {"domain": self.entry.domain, "labels": sorted(self.entry.labels),
                            "source": self.entry.source}
        elif isinstance(self.entry, FactCheckEntry):
            out["entry"] = {"title": self.entry.title, "verdict": self.entry.verdict,
                            "source": self.entry.source, "claim_urls": list(self.entry.claim_urls)}
        return out


NO_MATCH = MatchResult(False)


class FlagIndex:
    """Hash index over flag-listed hosts.

    Lists are merged in the order given: the first list to mention a domain
    supplies its ``source`` and labels from later lists are unioned in.
    Entries whose only label is ``credible`` are not indexed unless
    ``include_credible`` is set.
    """

    def __init__(self, flaglists: Iterable[Iterable[FlagListEntry]] = (), include_credible: bool = False):
        self._hosts: dict[str, FlagListEntry] = {}
        self.include_credible = include_credible
        for entries in flaglists:
            self.add(entries)

    @classmethod
    def from_entries(cls, entries: Iterable[FlagListEntry], **kw) -> "FlagIndex":
        return cls([entries], **kw)

    def add(self, entries: Iterable[FlagListEntry]) -> None:
        for e in entries:
            if not self.include_credible and e.labels <= {"credible"}:
                continue
            prev = self._hosts.get(e.domain)
            if prev is None:
                self._hosts[e.domain] = e
            else:
                self._hosts[e.domain] = FlagListEntry(prev.domain, prev.labels | e.labels, prev.source)

    def __len__(self) -> int:
        return len(self._hosts)

    def __contains__(self, host: str) -> bool:
        return self.match(host).matched

    def entries(self) -> list[FlagListEntry]:
        return list(self._hosts.values())

    def match(self, host: str) -> MatchResult:
        hit = self._hosts.get(host)
        if hit is not None:
            return MatchResult(True, hit, "exact-host")
        # walk parent domains label by label, longest first
        labels = host.split(".")
        for i in range(1, len(labels)):
            hit = self._hosts.get(".".join(labels[i:]))
            if hit is not None:
                return MatchResult(True, hit, "suffix-label")
        return NO_MATCH

    def match_url(self, url: str) -> MatchResult:
        try:
            host = normalize_domain(url)
        except URLError:
            return NO_MATCH
        return self.match(host)


def match_flaglist(host: str, flaglists: Union[FlagIndex, Sequence[Iterable[FlagListEntry]]]) -> MatchResult:
    """Match a normalized host against flag-lists (exact host, then parent domains)."""
    index = flaglists if isinstance(flaglists, FlagIndex) else FlagIndex(flaglists)
    return index.match(host)


def title_tokens(title: str, stopwords: Optional[Iterable[str]] = None) -> frozenset[str]:
    if stopwords is None:
        from .text.lexicons import default_lexicons

        stopwords = default_lexicons().stopwords.entries
    stop = stopwords if isinstance(stopwords, (set, frozenset, dict)) else set(stopwords)
    return frozenset(t for t in _WORD.findall(title.lower()) if t not in stop)


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def factcheck_lookup(
    article: Article,
    entries: Sequence[FactCheckEntry],
    sim_threshold: float = 0.8,
    stopwords: Optional[Iterable[str]] = None,
) -> MatchResult:
    """Find a fact check covering ``article``.

    An exact normalized-URL hit wins outright. Otherwise the headline is
    compared with each entry title by token-set Jaccard similarity (lowercased,
    stopwords removed); the best entry matches if it reaches ``sim_threshold``.
    Ties go to the earliest entry.
    """
    try:
        url = normalize_url(article.url)
    except URLError:
        url = None
    if url is not None:
        for e in entries:
            if url in e.claim_urls:
                return MatchResult(True, e, "exact-url", 1.0)
    if stopwords is None:
        from .text.lexicons import default_lexicons

        stopwords = default_lexicons().stopwords.entries
    head = title_tokens(article.headline, stopwords)
    if not head:
        return NO_MATCH
    best, best_sim = None, -1.0
    for e in entries:
        toks = title_tokens(e.title, stopwords)
        if not toks:
            continue
        sim = jaccard(head, toks)
        if sim > best_sim:
            best, best_sim = e, sim
    if best is not None and best_sim >= sim_threshold:
        return MatchResult(True, best, "title-similarity", best_sim)
    return MatchResult(False, None, None, best_sim if best is not None else None)
