import math
import random
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from checkit.ingest import Article, Lexicon
from checkit.text import (
    PENN_TAGS, LexiconSet, analyze, count_syllables, default_lexicons, extract_features,
    full_catalog, psychological_features, read_matrix, readability_indexes, stylistic_features,
    tokenize, top20_catalog, vocabulary_richness, write_matrix,
)
from checkit.text.catalog import FeatureCatalog

DATA = Path(__file__).parent / "data"


# ---------------------------------------------------------------- tokenize

def test_two_sentences_split_on_terminal_punctuation():
    t = tokenize("The cat sat. The dog ran.")
    assert [[tok.text for tok in s] for s in t.sentences] == [
        ["The", "cat", "sat", "."], ["The", "dog", "ran", "."]]


def test_empty_text_has_no_sentences_or_lines():
    t = tokenize("")
    assert t.sentences == [] and t.lines == 0


def test_newline_counts_lines_without_splitting_sentences():
    t = tokenize("A b\nc d")
    assert len(t.sentences) == 1 and t.lines == 2


def test_punctuation_only_text_has_no_sentences():
    assert tokenize("... !!! ?").sentences == []


def test_annotations():
    t = tokenize("NASA and Bob ran fast, 42 times.", stopwords={"and"})
    by = {tok.text: tok for tok in t.tokens}
    assert by["NASA"].casing == "all-caps"
    assert by["Bob"].casing == "initial-cap"
    assert by["ran"].casing == "lower"
    assert by["and"].is_stopword and not by["ran"].is_stopword
    assert by[","].is_punct and not by["42"].is_alpha
    assert all(tok.syllables >= 1 for tok in t.words)


@given(st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_sentences_empty_iff_no_word_characters(text):
    t = tokenize(text)
    has_word = any(c.isalnum() or c == "_" for c in text)
    assert (len(t.sentences) == 0) == (not has_word)
    assert t.lines == (0 if text == "" else 1 + text.count("\n"))


# ---------------------------------------------------------------- syllables

@pytest.mark.parametrize("word,n", [
    ("cat", 1), ("beautiful", 3), ("the", 1), ("banana", 3), ("elephant", 3),
    ("computer", 3), ("television", 4), ("information", 4), ("yesterday", 3),
    ("idea", 2), ("fire", 1), ("a", 1), ("rhythm", 1), ("queue", 1),
])
def test_syllable_counts_by_hand(word, n):
    assert count_syllables(word) == n


@given(st.from_regex(r"[A-Za-z]{1,15}", fullmatch=True))
def test_syllables_at_least_one(word):
    assert count_syllables(word) >= 1


# ---------------------------------------------------------------- tagger

def _golden():
    for line in (DATA / "tagger_golden.tsv").read_text(encoding="utf-8").splitlines():
        if line.startswith("#") or not line.strip():
            continue
        text, tagged = line.split("\t")
        yield text, [tuple(item.rsplit("/", 1)) for item in tagged.split(" ")]


@pytest.mark.parametrize("text,expected", list(_golden()))
def test_tagger_matches_golden_file(text, expected):
    t = analyze(text)
    assert [(tok.text, tok.pos) for tok in t.tokens] == expected


def test_hand_tagged_genitive_and_proper_noun():
    t = analyze("John 's book")
    assert [tok.pos for tok in t.tokens] == ["NNP", "POS", "NN"]
    f = stylistic_features(t, default_lexicons())
    assert f["proper_noun_count"] == 1 and f["genitive_marker_count"] == 1


def test_repeated_determiner():
    t = analyze("the the the")
    assert [tok.pos for tok in t.tokens] == ["DT"] * 3
    assert stylistic_features(t, default_lexicons())["proper_noun_count"] == 0


def test_sentence_initial_proper_noun_counted_once():
    f = stylistic_features(analyze("Paris is big."), default_lexicons())
    assert f["proper_noun_count"] == 1


@given(st.text(max_size=120))
@settings(max_examples=150, deadline=None)
def test_every_alphabetic_token_gets_a_penn_tag(text):
    t = analyze(text)
    assert all(tok.pos in PENN_TAGS for tok in t.tokens)
    assert [tok.pos for tok in analyze(text).tokens] == [tok.pos for tok in t.tokens]


# ---------------------------------------------------------------- readability

SMOG_FIXTURE = "\n".join(f"The elephant sat near door {i}." for i in range(30))


def test_readability_of_short_sentence():
    r = readability_indexes(tokenize("The cat sat on the mat."))
    assert r["flesch_kincaid"] == pytest.approx(0.39 * 6 + 11.8 * 1 - 15.59, abs=1e-9)
    assert r["gunning_fog"] == pytest.approx(2.4, abs=1e-9)


def test_smog_of_thirty_sentences_with_one_polysyllable_each():
    t = tokenize(SMOG_FIXTURE)
    assert len(t.sentences) == 30
    r = readability_indexes(t)
    assert r["smog"] == pytest.approx(1.0430 * math.sqrt(30) + 3.1291, abs=1e-9)


def test_readability_of_empty_text_is_zero():
    assert readability_indexes(tokenize("")) == {"gunning_fog": 0.0, "smog": 0.0, "flesch_kincaid": 0.0}


# vocabulary with hand-counted syllables, used to build fuzzed texts whose
# statistics are known without running the tokenizer
VOCAB = {"cat": 1, "dog": 1, "sat": 1, "ran": 1, "happy": 2, "idea": 2, "banana": 3,
         "elephant": 3, "yesterday": 3, "television": 4, "information": 4}


def _fuzzed(seed):
    rng = random.Random(seed)
    sents = [[rng.choice(list(VOCAB)) for _ in range(rng.randint(1, 9))] for _ in range(rng.randint(1, 12))]
    sents = [[w.capitalize() if rng.random() < 0.2 else w for w in s] for s in sents]
    text = " ".join(" ".join(s) + rng.choice([".", "!", "?"]) for s in sents)
    return text, sents


@pytest.mark.parametrize("seed", range(40))
def test_readability_and_richness_match_slow_recount(seed):
    text, sents = _fuzzed(seed)
    words = [w.lower() for s in sents for w in s]
    W, S = len(words), len(sents)
    Y = sum(VOCAB[w] for w in words)
    C = sum(1 for w in words if VOCAB[w] > 3)
    P = sum(1 for w in words if VOCAB[w] >= 3)
    r = readability_indexes(tokenize(text))
    assert r["gunning_fog"] == pytest.approx(0.4 * (W / S + 100 * C / W), rel=1e-12)
    assert r["flesch_kincaid"] == pytest.approx(0.39 * W / S + 11.8 * Y / W - 15.59, rel=1e-12, abs=1e-12)
    assert r["smog"] == pytest.approx(1.0430 * math.sqrt(P * 30 / S) + 3.1291, rel=1e-12)
    counts = Counter(words)
    v = vocabulary_richness(tokenize(text))
    assert v["type_token_ratio"] == pytest.approx(len(counts) / W)
    assert v["hapax_legomena"] == sum(1 for c in counts.values() if c == 1)
    assert v["dis_legomena"] == sum(1 for c in counts.values() if c == 2)


# ---------------------------------------------------------------- richness, style, sentiment

@pytest.mark.parametrize("text,ttr,hapax,dis", [
    ("a b c d", 1.0, 4, 0), ("a a b", 2 / 3, 1, 1), ("a a a", 1 / 3, 0, 0), ("", 0.0, 0, 0),
])
def test_vocabulary_richness(text, ttr, hapax, dis):
    v = vocabulary_richness(tokenize(text))
    assert v["type_token_ratio"] == pytest.approx(ttr)
    assert (v["hapax_legomena"], v["dis_legomena"]) == (hapax, dis)


def test_uppercase_ratio_counts_letters_only():
    f = stylistic_features(analyze("AB cd"), default_lexicons())
    assert f["uppercase_letter_ratio"] == 0.5


def test_colon_and_ellipsis_each_count_once():
    f = stylistic_features(analyze("a: b..."), default_lexicons())
    assert f["colon_or_ellipsis_count"] == 2


def test_empty_text_stylistic_values_are_zero():
    f = stylistic_features(analyze(""), default_lexicons())
    assert all(v == 0 for v in f.values())


def test_negations_are_counted():
    f = stylistic_features(analyze("I don't know. Never say no."), default_lexicons())
    assert f["negation_count"] == 3


def _fixture_lexicons():
    base = default_lexicons()
    return LexiconSet(base.stopwords, Lexicon("positive-opinion", {"good": 1}),
                      Lexicon("negative-opinion", {"bad": 1}), Lexicon("moral-foundation", {}),
                      Lexicon("afinn", {"good": 3, "bad": -3}), base.negations)


@pytest.mark.parametrize("text,avg", [("good good bad.", 3.0), ("good. bad.", 0.0), ("nothing here.", 0.0)])
def test_avg_afinn_is_mean_of_sentence_sums(text, avg):
    lex = _fixture_lexicons()
    assert psychological_features(analyze(text, lex), lex)["avg_afinn"] == avg


def test_opinion_counts():
    lex = _fixture_lexicons()
    f = psychological_features(analyze("good good bad.", lex), lex)
    assert (f["pos_opinion_count"], f["neg_opinion_count"], f["moral_foundation_count"]) == (2, 1, 0)


# ---------------------------------------------------------------- catalog and extraction

TABLE1 = [
    ("Total number of lines", "body"),
    ("Avg. number of stop-words per sentence", "body"),
    ("Ratio of uppercase letters", "headline"),
    ("Ratio of uppercase letters", "body"),
    ("Avg. number of uppercase words per sentence", "headline"),
    ("Avg. number of characters per word", "body"),
    ("Ratio of alphabetic letters", "headline"),
    ("Number of proper nouns (NP)", "body"),
    ("Avg. number of sentences beginning with lowercase letter", "body"),
    ("Avg. AFINN sentiment score", "body"),
    ("Total number of characters", "headline"),
    ("Ratio of digits", "body"),
    ("Avg. number of sentences beginning with uppercase letter", "body"),
    ("Ratio of alphabetic letters", "body"),
    ("Number of genitive markers (POS)", "body"),
    ("Number of colon or ellipsis", "headline"),
    ("Total number of words beginning with uppercase letter", "body"),
    ("Number of colon or ellipsis", "body"),
    ("Avg. number of characters per word", "headline"),
    ("Avg. number of stop-words per sentence", "headline"),
]


def test_top20_catalog_reproduces_table():
    cat = top20_catalog()
    assert [(d.name, d.scope) for d in cat] == TABLE1
    assert [d.id for d in cat] == list(range(20))


def test_full_catalog_has_534_unique_features():
    cat = full_catalog()
    assert len(cat) == 534
    assert len(set(cat.labels)) == 534
    assert [d.id for d in cat] == list(range(534))


ARTICLE = Article("a1", "http://news.example/story", "BREAKING: Mayor's Plan Fails",
                  "The mayor's plan failed.\nVoters were angry: very angry!\nOfficials said 3 things...")


def test_first_top20_value_is_body_line_count():
    v = extract_features(ARTICLE)
    assert len(v.values) == 20
    assert v.values[0] == 3


def test_empty_headline_zeroes_headline_features_only():
    full = full_catalog()
    base = extract_features(ARTICLE, full).values
    blank = extract_features(Article("a1", ARTICLE.url, "", ARTICLE.body), full).values
    for d in full:
        if d.scope == "headline":
            assert blank[d.id] == 0
        else:
            assert blank[d.id] == base[d.id]


def test_permuted_catalog_permutes_values():
    cat = top20_catalog()
    order = list(np.random.default_rng(3).permutation(20))
    base = extract_features(ARTICLE, cat).values
    perm = extract_features(ARTICLE, cat.permuted(order)).values
    assert np.array_equal(perm, base[order])


def test_feature_vectors_are_deterministic_and_finite():
    a = extract_features(ARTICLE, full_catalog()).values
    b = extract_features(ARTICLE, full_catalog()).values
    assert a.tobytes() == b.tobytes()
    assert np.all(np.isfinite(a))


text_strategy = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=150)


@given(text_strategy, text_strategy, text_strategy)
@settings(max_examples=60, deadline=None)
def test_scope_isolation_and_ratio_bounds(head, body, other):
    full = full_catalog()
    v1 = extract_features(Article("x", "http://a.example", head, body), full).values
    v2 = extract_features(Article("x", "http://a.example", other, body), full).values
    body_ids = [d.id for d in full if d.scope == "body"]
    assert np.array_equal(v1[body_ids], v2[body_ids])
    for d in full:
        if d.unit == "ratio":
            assert 0.0 <= v1[d.id] <= 1.0, d.label
        if d.unit == "count":
            assert v1[d.id] >= 0 and float(v1[d.id]).is_integer(), d.label


words = st.lists(st.sampled_from(["Alice", "Bob's", "went", "home", "a:", "b...", "NASA", "fast", "7"]),
                 min_size=1, max_size=12)


@given(st.lists(words, min_size=1, max_size=5))
@settings(max_examples=80, deadline=None)
def test_doubling_body_doubles_pure_counts(sentences):
    body = " ".join(" ".join(s) + "." for s in sentences)
    cat = full_catalog()
    keys = ["Total number of lines", "Total number of characters", "Number of proper nouns (NP)",
            "Number of colon or ellipsis"]
    ids = [cat.index(f"{k}@body") for k in keys]
    one = extract_features(Article("x", "http://a.example", "", body), cat).values[ids]
    two = extract_features(Article("x", "http://a.example", "", body + "\n" + body), cat).values[ids]
    assert np.array_equal(two, 2 * one)


def test_matrix_csv_round_trip_with_missing_cells():
    cat = top20_catalog()
    X = np.arange(40, dtype=float).reshape(2, 20) / 7
    X[1, 3] = np.nan
    text = write_matrix(cat, X, ["fake", "credible"])
    assert text.splitlines()[0].endswith(",label")
    cat2, X2, labels = read_matrix(text)
    assert cat2 == cat and labels == ["fake", "credible"]
    assert np.array_equal(np.isnan(X2), np.isnan(X))
    assert np.array_equal(np.nan_to_num(X2), np.nan_to_num(X))


def test_catalog_rejects_duplicates():
    d = top20_catalog()[0]
    with pytest.raises(ValueError):
        FeatureCatalog([d, d])


def test_superscript_digit_is_not_a_letter():
    t = tokenize("x² ² y")
    assert [w.text for w in t.tokens if w.is_alpha] == ["x²", "y"]
    extract_features(Article("s", "http://a.example", "²", "² ²."), top20_catalog())
