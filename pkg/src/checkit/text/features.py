"""Stylistic, complexity and psychological features of a single text."""

from __future__ import annotations

import math
from collections import Counter

from .lexicons import LexiconSet, default_lexicons
from .tagger import PENN_TAGS, pos_tag
from .tokenize import TokenizedText, tokenize

QUOTES = frozenset(['"', "“", "”", "'", "‘", "’", "«", "»"])
COLON_OR_ELLIPSIS = frozenset([":", "...", "…"])
PROPER_NOUN_TAGS = ("NNP", "NNPS")


def _div(a: float, b: float) -> float:
    return a / b if b else 0.0


def analyze(text: str, lexicons: LexiconSet | None = None) -> TokenizedText:
    """Tokenize, mark stopwords and POS-tag ``text``."""
    lexicons = lexicons or default_lexicons()
    stop = lexicons.require("stopwords").entries
    return pos_tag(tokenize(text, stopwords=stop))


def readability_indexes(t: TokenizedText) -> dict[str, float]:
    """Gunning fog, SMOG grade and Flesch-Kincaid grade level.

    Complex words for fog have more than 3 syllables; SMOG counts
    polysyllables (3 or more). Texts without sentences or words score 0.
    """
    words = t.words
    n_sent, n_words = len(t.sentences), len(words)
    if n_sent == 0 or n_words == 0:
        return {"gunning_fog": 0.0, "smog": 0.0, "flesch_kincaid": 0.0}
    syllables = sum(w.syllables for w in words)
    complex_words = sum(1 for w in words if w.syllables > 3)
    poly = sum(1 for w in words if w.syllables >= 3)
    wps = n_words / n_sent
    return {
        "gunning_fog": 0.4 * (wps + 100.0 * complex_words / n_words),
        "smog": 1.0430 * math.sqrt(poly * 30.0 / n_sent) + 3.1291,
        "flesch_kincaid": 0.39 * wps + 11.8 * syllables / n_words - 15.59,
    }


def vocabulary_richness(t: TokenizedText) -> dict[str, float]:
    counts = Counter(w.lower for w in t.words)
    total = sum(counts.values())
    if not total:
        return {"type_token_ratio": 0.0, "hapax_legomena": 0, "dis_legomena": 0}
    return {
        "type_token_ratio": len(counts) / total,
        "hapax_legomena": sum(1 for c in counts.values() if c == 1),
        "dis_legomena": sum(1 for c in counts.values() if c == 2),
    }


def psychological_features(t: TokenizedText, lexicons: LexiconSet) -> dict[str, float]:
    pos = lexicons.require("positive").entries
    neg = lexicons.require("negative").entries
    moral = lexicons.require("moral").entries
    afinn = lexicons.require("afinn").entries
    words = [tok.lower for tok in t.tokens if not tok.is_punct]
    n_pos = sum(1 for w in words if w in pos)
    n_neg = sum(1 for w in words if w in neg)
    sums = [sum(afinn.get(tok.lower, 0) for tok in s) for s in t.sentences]
    return {
        "pos_opinion_count": n_pos,
        "neg_opinion_count": n_neg,
        "moral_foundation_count": sum(1 for w in words if w in moral),
        "avg_afinn": _div(sum(sums), len(sums)),
        "total_afinn": sum(sums),
        "opinion_polarity": _div(n_pos, n_pos + n_neg),
    }


def stylistic_features(t: TokenizedText, lexicons: LexiconSet) -> dict[str, float]:
    """Character, word and sentence level style counts of a tagged text."""
    raw = t.raw
    chars = [c for c in raw if not c.isspace()]
    n_chars = len(chars)
    letters = [c for c in chars if c.isalpha()]
    n_upper = sum(1 for c in letters if c.isupper())
    n_digits = sum(1 for c in chars if c.isdigit())
    n_punct_chars = sum(1 for c in chars if not c.isalnum() and c != "_")

    tokens = t.tokens
    words = t.words
    n_sent = len(t.sentences)
    negations = lexicons.negations
    all_caps = sum(1 for w in words if w.casing == "all-caps")

    begin_lower = begin_upper = 0
    for s in t.sentences:
        first = next((tok for tok in s if tok.is_alpha), None)
        if first is None:
            continue
        c = next(ch for ch in first.text if ch.isalpha())
        if c.islower():
            begin_lower += 1
        elif c.isupper():
            begin_upper += 1

    n_stop = sum(1 for tok in tokens if tok.is_stopword)
    punct_tokens = [tok for tok in tokens if tok.is_punct]
    return {
        "total_lines": t.lines,
        "total_characters": n_chars,
        "total_words": len(words),
        "total_sentences": n_sent,
        "avg_stopwords_per_sentence": _div(n_stop, n_sent),
        "stopword_ratio": _div(n_stop, len(words)),
        "uppercase_letter_ratio": _div(n_upper, len(letters)),
        "alphabetic_letter_ratio": _div(len(letters), n_chars),
        "digit_ratio": _div(n_digits, n_chars),
        "punctuation_ratio": _div(n_punct_chars, n_chars),
        "avg_uppercase_words_per_sentence": _div(all_caps, n_sent),
        "uppercase_word_count": all_caps,
        "avg_chars_per_word": _div(sum(len(w.text) for w in words), len(words)),
        "avg_words_per_sentence": _div(len(words), n_sent),
        "words_beginning_uppercase": sum(1 for w in words if w.text[0].isupper()),
        "sentences_beginning_lowercase": _div(begin_lower, n_sent),
        "sentences_beginning_uppercase": _div(begin_upper, n_sent),
        "colon_or_ellipsis_count": sum(1 for tok in punct_tokens if tok.text in COLON_OR_ELLIPSIS),
        "quote_count": sum(1 for tok in punct_tokens if tok.text in QUOTES),
        "negation_count": sum(1 for tok in tokens if tok.lower in negations),
        "exclamation_count": sum(1 for tok in punct_tokens if tok.text == "!"),
        "question_count": sum(1 for tok in punct_tokens if tok.text == "?"),
        "comma_count": sum(1 for tok in punct_tokens if tok.text == ","),
        "avg_punctuation_per_sentence": _div(len(punct_tokens), n_sent),
        "proper_noun_count": sum(1 for tok in tokens if tok.pos in PROPER_NOUN_TAGS),
        "genitive_marker_count": sum(1 for tok in tokens if tok.pos == "POS"),
    }


def complexity_features(t: TokenizedText) -> dict[str, float]:
    words = t.words
    out = dict(readability_indexes(t))
    out.update(vocabulary_richness(t))
    out["avg_syllables_per_word"] = _div(sum(w.syllables for w in words), len(words))
    out["complex_word_count"] = sum(1 for w in words if w.syllables > 3)
    out["polysyllable_count"] = sum(1 for w in words if w.syllables >= 3)
    out["long_word_count"] = sum(1 for w in words if len(w.text) > 6)
    return out


def tag_features(t: TokenizedText) -> dict[str, float]:
    """Five statistics per Penn tag: count, token ratio, per-sentence mean and
    max, and the fraction of sentences containing the tag."""
    n_tokens = len(t.tokens)
    n_sent = len(t.sentences)
    per_sentence = [Counter(tok.pos for tok in s) for s in t.sentences]
    total = Counter()
    for c in per_sentence:
        total.update(c)
    out = {}
    for tag in PENN_TAGS:
        n = total.get(tag, 0)
        out[f"tag_count:{tag}"] = n
        out[f"tag_ratio:{tag}"] = _div(n, n_tokens)
        out[f"tag_avg:{tag}"] = _div(n, n_sent)
        out[f"tag_max:{tag}"] = max((c.get(tag, 0) for c in per_sentence), default=0)
        out[f"tag_coverage:{tag}"] = _div(sum(1 for c in per_sentence if c.get(tag)), n_sent)
    return out


def text_features(text: str, lexicons: LexiconSet | None = None) -> dict[str, float]:
    """Every per-scope feature of ``text`` keyed by catalog key."""
    lexicons = lexicons or default_lexicons()
    t = analyze(text, lexicons)
    out = stylistic_features(t, lexicons)
    out.update(complexity_features(t))
    out.update(psychological_features(t, lexicons))
    out.update(tag_features(t))
    return out
