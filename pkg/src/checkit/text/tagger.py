"""Deterministic Penn Treebank tagger: closed-class lexicon plus suffix rules.

No statistical model is involved, so the same text always receives the same
tags. Accuracy is modest, but the classifier is trained on the output of this
same tagger, so only consistency matters.
"""

from __future__ import annotations

import re

from .tokenize import TokenizedText

PENN_TAGS = (
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS",
    "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO",
    "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
    "$", "#", "``", "''", "(", ")", ",", ".", ":",
)


def _words(tag: str, words: str) -> dict[str, str]:
    return {w: tag for w in words.split()}


LEXICON: dict[str, str] = {}
for _tag, _words_str in [
    ("DT", "the a an this that these those every each some any no another all either neither"),
    ("PDT", "both half"),
    ("CC", "and or but nor yet plus"),
    ("IN", "of in on at by for with from about into over after before under between "
           "through during without within against among upon since until while because "
           "although though if unless than whether toward towards across behind beyond "
           "near off onto per via despite like"),
    ("TO", "to"),
    ("PRP", "i you he she it we they me him us them myself yourself himself herself "
            "itself ourselves themselves"),
    ("PRP$", "my your his her its our their"),
    ("WDT", "which whatever whichever"),
    ("WP", "who whom what whoever"),
    ("WP$", "whose"),
    ("WRB", "when where why how whenever wherever"),
    ("EX", "there"),
    ("MD", "can could may might must shall should will would ca wo 'll 'd"),
    ("VBZ", "is has does 's"),
    ("VBP", "are am have do 're 've 'm say"),
    ("VBD", "was were had did said made went came took saw got told gave found knew "
            "thought became left felt kept began sat ran ate wrote"),
    ("VB", "be go get make take see come give know tell believe stop want think find "
           "use keep let help show try ask need"),
    ("CD", "one two three four five six seven eight nine ten eleven twelve twenty "
           "hundred thousand million billion trillion dozen"),
    ("VBN", "been done gone seen taken given known shown written"),
    ("VBG", "being having doing going"),
    ("RB", "not n't never very also too so just only even still already always often "
           "now then here again ever soon almost quite rather really perhaps instead "
           "however thus therefore"),
    ("RBR", "more less"),
    ("RBS", "most least"),
    ("JJ", "good new old big small great high low long short other same different "
           "important large little own right sure true false real fake late safe "
           "early free full whole"),
    ("JJR", "better worse bigger smaller higher lower larger faster slower"),
    ("JJS", "best worst biggest largest highest"),
    ("UH", "oh wow hey yes ok okay please"),
    ("RP", "up out down"),
    ("NN", "time year people way day man thing woman life world news state school "
           "government country week company system program question work number "
           "night point home water room mother area money story fact month lot "
           "study book eye job word business issue side kind head house service "
           "friend father power hour game line end member law car city community "
           "name president team minute idea kid body information back parent face "
           "level office door health person art war history party result change "
           "morning reason research girl guy moment air teacher force education "
           "cat dog mat report police source claim video expert vaccine plan anyone "
           "someone everyone anything something everything nothing"),
    ("NNS", "men women children"),
]:
    LEXICON.update(_words(_tag, _words_str))

_PUNCT = {
    ".": ".", "!": ".", "?": ".", ",": ",", ":": ":", ";": ":", "...": ":", "…": ":",
    "-": ":", "--": ":", "—": ":", "–": ":", "(": "(", "[": "(", "{": "(",
    ")": ")", "]": ")", "}": ")", "$": "$", "€": "$", "£": "$", "#": "#",
    "“": "``", "‘": "``", "”": "''", "’": "''",
}

# ordered; first match wins
_SUFFIX_RULES = [
    (re.compile(r".+ly$"), "RB"),
    (re.compile(r".+ing$"), "VBG"),
    (re.compile(r".+ed$"), "VBD"),
    (re.compile(r".+(tion|sion|ment|ness|ity|ship|ance|ence|ism|ist)$"), "NN"),
    (re.compile(r".+(tions|sions|ments|nesses|ities|ists)$"), "NNS"),
    (re.compile(r".+(ous|ful|able|ible|ive|al|ic|less|ish|ary)$"), "JJ"),
    (re.compile(r".+est$"), "JJS"),
    (re.compile(r".+(ize|ise|ify|ate)$"), "VB"),
    (re.compile(r".+[^s]s$"), "NNS"),
]
_STRONG_SUFFIX = re.compile(r".+(ly|ing|ed|tions?|sions?|ments?|ness|ity|ists?|ous|ful|able|ible|ive)$")
_NUMBER = re.compile(r"^[+-]?\d[\d,.:/-]*%?$")


def _tag_word(tok, initial: bool) -> str:
    low = tok.lower
    if _NUMBER.match(tok.text):
        return "CD"
    if not tok.is_alpha:
        return "SYM"
    if tok.casing == "all-caps" or (tok.casing == "initial-cap" and not initial):
        if low in LEXICON and len(low) <= 3 and tok.casing == "all-caps":
            return LEXICON[low]
        if tok.casing == "initial-cap" and low in LEXICON and LEXICON[low] not in ("NN", "JJ"):
            return LEXICON[low]
        return "NNPS" if low.endswith("s") and len(low) > 3 and low[:-1] in LEXICON else "NNP"
    if low in LEXICON:
        return LEXICON[low]
    if low.endswith("s") and LEXICON.get(low[:-1]) == "NN":
        return "NNS"
    if initial and tok.casing == "initial-cap" and not _STRONG_SUFFIX.match(low):
        # unknown capitalized sentence opener, e.g. "Paris"
        return "NNP"
    for rule, tag in _SUFFIX_RULES:
        if rule.match(low):
            return tag
    return "NN"


def pos_tag(t: TokenizedText) -> TokenizedText:
    """Attach a Penn tag to every token of ``t`` in place and return it."""
    quote_open = True
    for sentence in t.sentences:
        initial = True
        prev = None  # previous non-punctuation token
        for tok in sentence:
            if tok.is_punct:
                if tok.text == '"':
                    tok.pos = "``" if quote_open else "''"
                    quote_open = not quote_open
                elif tok.text == "'":
                    tok.pos = "''"
                else:
                    tok.pos = _PUNCT.get(tok.text, "SYM")
                continue
            if tok.lower == "'s":
                # genitive unless it follows a pronoun ("it's")
                tok.pos = "VBZ" if prev is not None and prev.pos in ("PRP", "EX", "WP") else "POS"
            elif tok.lower == "'":
                tok.pos = "POS"
            else:
                tok.pos = _tag_word(tok, initial)
                # base form after a modal or infinitival "to"
                if prev is not None and prev.pos in ("MD", "TO") and tok.pos in ("NN", "VBP", "JJ"):
                    if tok.lower not in LEXICON or LEXICON[tok.lower] in ("VB", "VBP"):
                        tok.pos = "VB"
            initial = False
            prev = tok
    return t
