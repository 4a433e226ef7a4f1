"""Feature catalogs, extraction into vectors, and the CSV feature-matrix format."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from ..ingest import Article
from .features import text_features
from .lexicons import LexiconSet, default_lexicons
from .tagger import PENN_TAGS

SCOPES = ("headline", "body")

# key, display name, kind, unit
SCALAR_FEATURES = [
    ("total_lines", "Total number of lines", "stylistic", "count"),
    ("total_characters", "Total number of characters", "stylistic", "count"),
    ("total_words", "Total number of words", "stylistic", "count"),
    ("total_sentences", "Total number of sentences", "stylistic", "count"),
    ("avg_stopwords_per_sentence", "Avg. number of stop-words per sentence", "stylistic", "value"),
    ("stopword_ratio", "Ratio of stop-words", "stylistic", "ratio"),
    ("uppercase_letter_ratio", "Ratio of uppercase letters", "stylistic", "ratio"),
    ("alphabetic_letter_ratio", "Ratio of alphabetic letters", "stylistic", "ratio"),
    ("digit_ratio", "Ratio of digits", "stylistic", "ratio"),
    ("punctuation_ratio", "Ratio of punctuation characters", "stylistic", "ratio"),
    ("avg_uppercase_words_per_sentence", "Avg. number of uppercase words per sentence", "stylistic", "value"),
    ("uppercase_word_count", "Total number of uppercase words", "stylistic", "count"),
    ("avg_chars_per_word", "Avg. number of characters per word", "stylistic", "value"),
    ("avg_words_per_sentence", "Avg. number of words per sentence", "stylistic", "value"),
    ("words_beginning_uppercase", "Total number of words beginning with uppercase letter", "stylistic", "count"),
    ("sentences_beginning_lowercase", "Avg. number of sentences beginning with lowercase letter", "stylistic", "ratio"),
    ("sentences_beginning_uppercase", "Avg. number of sentences beginning with uppercase letter", "stylistic", "ratio"),
    ("colon_or_ellipsis_count", "Number of colon or ellipsis", "stylistic", "count"),
    ("quote_count", "Number of quotes", "stylistic", "count"),
    ("negation_count", "Number of negations", "stylistic", "count"),
    ("exclamation_count", "Number of exclamation marks", "stylistic", "count"),
    ("question_count", "Number of question marks", "stylistic", "count"),
    ("comma_count", "Number of commas", "stylistic", "count"),
    ("avg_punctuation_per_sentence", "Avg. number of punctuation marks per sentence", "stylistic", "value"),
    ("proper_noun_count", "Number of proper nouns (NP)", "stylistic", "count"),
    ("genitive_marker_count", "Number of genitive markers (POS)", "stylistic", "count"),
    ("gunning_fog", "Gunning Fog index", "complexity", "value"),
    ("smog", "SMOG grade", "complexity", "value"),
    ("flesch_kincaid", "Flesch-Kincaid grade level", "complexity", "value"),
    ("type_token_ratio", "Type-token ratio", "complexity", "ratio"),
    ("hapax_legomena", "Number of hapax legomena", "complexity", "count"),
    ("dis_legomena", "Number of dis legomena", "complexity", "count"),
    ("avg_syllables_per_word", "Avg. number of syllables per word", "complexity", "value"),
    ("complex_word_count", "Number of complex words", "complexity", "count"),
    ("polysyllable_count", "Number of polysyllabic words", "complexity", "count"),
    ("long_word_count", "Number of long words", "complexity", "count"),
    ("pos_opinion_count", "Number of positive opinion words", "psychological", "count"),
    ("neg_opinion_count", "Number of negative opinion words", "psychological", "count"),
    ("moral_foundation_count", "Number of moral foundation words", "psychological", "count"),
    ("avg_afinn", "Avg. AFINN sentiment score", "psychological", "value"),
    ("total_afinn", "Total AFINN sentiment score", "psychological", "value"),
    ("opinion_polarity", "Ratio of positive to all opinion words", "psychological", "ratio"),
]

_TAG_STATS = [
    ("tag_count", "Number of {} tags", "count"),
    ("tag_ratio", "Ratio of {} tags", "ratio"),
    ("tag_avg", "Avg. number of {} tags per sentence", "value"),
    ("tag_max", "Max. number of {} tags in a sentence", "count"),
    ("tag_coverage", "Ratio of sentences containing {} tags", "ratio"),
]

# canonical ranking order: (key, scope)
TOP20 = [
    ("total_lines", "body"),
    ("avg_stopwords_per_sentence", "body"),
    ("uppercase_letter_ratio", "headline"),
    ("uppercase_letter_ratio", "body"),
    ("avg_uppercase_words_per_sentence", "headline"),
    ("avg_chars_per_word", "body"),
    ("alphabetic_letter_ratio", "headline"),
    ("proper_noun_count", "body"),
    ("sentences_beginning_lowercase", "body"),
    ("avg_afinn", "body"),
    ("total_characters", "headline"),
    ("digit_ratio", "body"),
    ("sentences_beginning_uppercase", "body"),
    ("alphabetic_letter_ratio", "body"),
    ("genitive_marker_count", "body"),
    ("colon_or_ellipsis_count", "headline"),
    ("words_beginning_uppercase", "body"),
    ("colon_or_ellipsis_count", "body"),
    ("avg_chars_per_word", "headline"),
    ("avg_stopwords_per_sentence", "headline"),
]
TOP20_VERSION = "top20-v1"
FULL_VERSION = "full534-v1"


@dataclass(frozen=True)
class FeatureDef:
    id: int
    name: str
    scope: str
    kind: str
    key: str
    unit: str = "value"

    @property
    def label(self) -> str:
        return f"{self.name}@{self.scope}"


class FeatureCatalog:
    """Ordered feature definitions with ids ``0..n-1``."""

    def __init__(self, defs: Iterable[FeatureDef], version: str = "custom"):
        defs = list(defs)
        # re-number so ids are always contiguous
        self.defs = tuple(FeatureDef(i, d.name, d.scope, d.kind, d.key, d.unit) for i, d in enumerate(defs))
        self.version = version
        seen = set()
        for d in self.defs:
            if d.scope not in SCOPES:
                raise ValueError(f"unknown scope {d.scope!r}")
            if (d.name, d.scope) in seen:
                raise ValueError(f"duplicate feature {d.label!r}")
            seen.add((d.name, d.scope))

    def __len__(self) -> int:
        return len(self.defs)

    def __iter__(self):
        return iter(self.defs)

    def __getitem__(self, i: int) -> FeatureDef:
        return self.defs[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureCatalog) and self.labels == other.labels

    @property
    def labels(self) -> list[str]:
        return [d.label for d in self.defs]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def subset(self, ids: Sequence[int], version: str = "custom") -> "FeatureCatalog":
        return FeatureCatalog([self.defs[i] for i in ids], version=version)

    def permuted(self, order: Sequence[int]) -> "FeatureCatalog":
        return self.subset(order, version=self.version + "-permuted")

    @classmethod
    def from_labels(cls, labels: Sequence[str], version: str = "custom") -> "FeatureCatalog":
        lookup = {d.label: d for d in full_catalog()}
        defs = []
        for lab in labels:
            if lab not in lookup:
                raise ValueError(f"unknown feature column {lab!r}")
            defs.append(lookup[lab])
        return cls(defs, version=version)


def _scope_defs() -> list[tuple[str, str, str, str]]:
    defs = list(SCALAR_FEATURES)
    for tag in PENN_TAGS:
        for key, name, unit in _TAG_STATS:
            defs.append((f"{key}:{tag}", name.format(tag), "stylistic", unit))
    return defs


@lru_cache(maxsize=1)
def full_catalog() -> FeatureCatalog:
    """All headline and body features (534 in total)."""
    defs = []
    for scope in SCOPES:
        for key, name, kind, unit in _scope_defs():
            defs.append(FeatureDef(len(defs), name, scope, kind, key, unit))
    return FeatureCatalog(defs, version=FULL_VERSION)


@lru_cache(maxsize=1)
def top20_catalog() -> FeatureCatalog:
    """The twenty features retained for the deployed linguistic model."""
    by_key = {(d.key, d.scope): d for d in full_catalog()}
    return FeatureCatalog([by_key[k] for k in TOP20], version=TOP20_VERSION)


def catalog_for_version(version: str) -> FeatureCatalog:
    if version == TOP20_VERSION:
        return top20_catalog()
    if version == FULL_VERSION:
        return full_catalog()
    raise ValueError(f"unknown catalog version {version!r}")


@dataclass
class FeatureVector:
    catalog: FeatureCatalog
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != len(self.catalog):
            raise ValueError("vector length does not match catalog")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.catalog.labels, self.values.tolist()))


def extract_features(article: Article, catalog: Optional[FeatureCatalog] = None,
                     lexicons: Optional[LexiconSet] = None) -> FeatureVector:
    """Compute ``catalog``'s features for ``article`` (headline and body scopes)."""
    catalog = catalog or top20_catalog()
    lexicons = lexicons or default_lexicons()
    scopes_needed = {d.scope for d in catalog}
    computed = {}
    if "headline" in scopes_needed:
        computed["headline"] = text_features(article.headline, lexicons)
    if "body" in scopes_needed:
        computed["body"] = text_features(article.body, lexicons)
    values = np.array([float(computed[d.scope][d.key]) for d in catalog], dtype=np.float64)
    return FeatureVector(catalog, values)


def extract_matrix(articles: Sequence[Article], catalog: Optional[FeatureCatalog] = None,
                   lexicons: Optional[LexiconSet] = None) -> np.ndarray:
    catalog = catalog or top20_catalog()
    rows = [extract_features(a, catalog, lexicons).values for a in articles]
    return np.vstack(rows) if rows else np.zeros((0, len(catalog)))


# --------------------------------------------------------------------------
# CSV feature matrix

LABEL_COLUMN = "label"


def write_matrix(catalog: FeatureCatalog, X: np.ndarray, labels: Optional[Sequence[str]] = None) -> str:
    """Serialize a feature matrix; NaN cells are written empty (missing)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = catalog.labels + ([LABEL_COLUMN] if labels is not None else [])
    w.writerow(header)
    for i, row in enumerate(np.asarray(X, dtype=np.float64)):
        cells = ["" if np.isnan(v) else repr(float(v)) for v in row]
        if labels is not None:
            cells.append(labels[i])
        w.writerow(cells)
    return buf.getvalue()


def read_matrix(text: str, catalog: Optional[FeatureCatalog] = None):
    """Parse the CSV format back into ``(catalog, X, labels or None)``.

    Column labels are ``name@scope``. Unknown labels are accepted and get a
    synthetic definition so arbitrary matrices can be fed to selection.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise ValueError("empty feature matrix")
    has_label = bool(header) and header[-1] == LABEL_COLUMN
    cols = header[:-1] if has_label else header
    if catalog is None:
        known = {d.label: d for d in full_catalog()}
        defs = []
        for lab in cols:
            if lab in known:
                defs.append(known[lab])
            else:
                name, _, scope = lab.rpartition("@")
                if scope not in SCOPES:
                    name, scope = lab, "body"
                defs.append(FeatureDef(0, name, scope, "stylistic", name))
        catalog = FeatureCatalog(defs)
    elif catalog.labels != cols:
        raise ValueError("matrix columns do not match the catalog")
    rows, labels = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        vals = row[:-1] if has_label else row
        try:
            rows.append([float(v) if v.strip() else np.nan for v in vals])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if has_label:
            labels.append(row[-1])
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(cols))
    return catalog, X, (labels if has_label else None)
