"""Linguistic feature extraction."""

from .catalog import (
    FeatureCatalog, FeatureDef, FeatureVector, extract_features, extract_matrix,
    full_catalog, read_matrix, top20_catalog, write_matrix,
)
from .features import (
    analyze, psychological_features, readability_indexes, stylistic_features,
    text_features, vocabulary_richness,
)
from .lexicons import LexiconError, LexiconSet, default_lexicons, load_lexicons
from .tagger import PENN_TAGS, pos_tag
from .tokenize import TokenizedText, count_syllables, tokenize

__all__ = [
    "FeatureCatalog", "FeatureDef", "FeatureVector", "LexiconError", "LexiconSet",
    "PENN_TAGS", "TokenizedText", "analyze", "count_syllables", "default_lexicons",
    "extract_features", "extract_matrix", "full_catalog", "load_lexicons", "pos_tag",
    "psychological_features", "read_matrix", "readability_indexes", "stylistic_features",
    "text_features", "tokenize", "top20_catalog", "vocabulary_richness", "write_matrix",
]
