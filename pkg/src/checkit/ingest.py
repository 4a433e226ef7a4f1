"""Parsing and validation of every external input.

Record streams (articles, tweets, fact checks, blacklists) are newline
delimited JSON objects, one record per line. Flag-lists are either
``domain,label,source`` CSV or JSON. Lexicons are ``word<TAB>valence`` (AFINN)
or one word per line. A malformed record rejects the whole input.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Mapping, Optional, Union

from .urls import URLError, is_absolute_url, normalize_domain, normalize_url

ByteSource = Union[bytes, str, IO[bytes], IO[str]]

RESOURCE_KINDS = ("articles", "tweets", "flaglist", "factchecks", "lexicon", "blacklist")
LEXICON_KINDS = ("positive-opinion", "negative-opinion", "moral-foundation", "afinn", "stopwords")
ARTICLE_LABELS = ("fake", "credible")
FACTCHECK_VERDICTS = ("fake", "true", "mixed")
FLAG_LABELS = (
    "fake news", "satire", "extreme bias", "conspiracy theory", "rumor mill",
    "state news", "junk science", "hate news", "clickbait", "political",
    "credible", "unreliable",
)
# OpenSources-style short tags
_LABEL_ALIASES = {
    "fake": "fake news", "bias": "extreme bias", "conspiracy": "conspiracy theory",
    "rumor": "rumor mill", "state": "state news", "junksci": "junk science",
    "hate": "hate news", "reliable": "credible",
}


class SchemaError(ValueError):
    """A record violated its schema. Carries the 1-based line and field."""

    def __init__(self, reason: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        self.reason = reason
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {reason}" if prefix else reason)


class PackageError(ValueError):
    """A resource package failed validation."""


@dataclass(frozen=True)
class Article:
    id: str
    url: str
    headline: str
    body: str
    author_handle: Optional[str] = None
    label: Optional[str] = None

    @property
    def host(self) -> str:
        return normalize_domain(self.url)


@dataclass(frozen=True)
class Tweet:
    id: str
    user_id: str
    timestamp: int
    urls: tuple[str, ...] = ()
    retweet_of_user: Optional[str] = None


@dataclass(frozen=True)
class FlagListEntry:
    domain: str
    labels: frozenset[str]
    source: str = ""


@dataclass(frozen=True)
class FactCheckEntry:
    claim_urls: tuple[str, ...]
    title: str
    verdict: str
    source: str
    date: str


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    valence: int


@dataclass(frozen=True)
class BlacklistRecord:
    user_id: str
    score: float
    band: str
    sessions_seen: int


@dataclass
class Lexicon:
    kind: str
    entries: dict[str, int] = field(default_factory=dict)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, word: str, default: int = 0) -> int:
        return self.entries.get(word, default)


# --------------------------------------------------------------------------
# low level helpers

def _read_text(stream: ByteSource) -> str:
    if hasattr(stream, "read"):
        stream = stream.read()
    if isinstance(stream, str):
        return stream
    try:
        return bytes(stream).decode("utf-8")
    except UnicodeDecodeError as exc:
        # locate the offending line for the error message
        line = bytes(stream)[: exc.start].count(b"\n") + 1
        raise SchemaError(f"invalid UTF-8 ({exc.reason})", line=line) from None


def _lines(text: str) -> list[str]:
    # only "\n" ends a record; str.splitlines would also split on U+2028 etc.
    return [ln[:-1] if ln.endswith("\r") else ln for ln in text.split("\n")]


def _json_lines(text: str):
    for lineno, raw in enumerate(_lines(text), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc.msg}", line=lineno) from None
        if not isinstance(obj, dict):
            raise SchemaError("record must be an object", line=lineno)
        yield lineno, obj


def _req_str(obj: Mapping, name: str, line: int, *, allow_empty: bool = False) -> str:
    if name not in obj or obj[name] is None:
        raise SchemaError("missing required field", line=line, field=name)
    value = obj[name]
    if not isinstance(value, str):
        raise SchemaError("expected a string", line=line, field=name)
    if not allow_empty and not value:
        raise SchemaError("must be non-empty", line=line, field=name)
    return value


def _opt_str(obj: Mapping, name: str, line: int) -> Optional[str]:
    value = obj.get(name)
    if value is None or value == "":
        return None
    if not isinstance(value, str):
        raise SchemaError("expected a string or null", line=line, field=name)
    return value


def _url_list(obj: Mapping, name: str, line: int) -> list[str]:
    value = obj.get(name, [])
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(u, str) for u in value):
        raise SchemaError("expected a list of strings", line=line, field=name)
    for u in value:
        if not is_absolute_url(u):
            raise SchemaError(f"not an absolute URL: {u!r}", line=line, field=name)
    return value


def canonical_flag_label(label: str) -> str:
    key = label.strip().lower()
    key = _LABEL_ALIASES.get(key, key)
    if key not in FLAG_LABELS:
        raise ValueError(f"unknown flag-list label {label!r}")
    return key


# --------------------------------------------------------------------------
# per-kind record parsers

def _parse_article(obj, line) -> Article:
    url = _req_str(obj, "url", line)
    if not is_absolute_url(url):
        raise SchemaError("not an absolute URL with a host", line=line, field="url")
    label = _opt_str(obj, "label", line)
    if label is not None and label not in ARTICLE_LABELS:
        raise SchemaError(f"label must be one of {ARTICLE_LABELS}", line=line, field="label")
    return Article(
        id=_req_str(obj, "id", line),
        url=url,
        headline=_req_str(obj, "headline", line, allow_empty=True),
        body=_req_str(obj, "body", line, allow_empty=True),
        author_handle=_opt_str(obj, "author_handle", line),
        label=label,
    )


def _parse_tweet(obj, line) -> Tweet:
    tid = _req_str(obj, "id", line)
    user = _req_str(obj, "user_id", line)
    ts = obj.get("timestamp")
    if ts is None:
        raise SchemaError("missing required field", line=line, field="timestamp")
    if (isinstance(ts, bool) or not isinstance(ts, (int, float))
            or not math.isfinite(ts) or ts != int(ts)):
        raise SchemaError("expected integer seconds", line=line, field="timestamp")
    if ts < 0:
        raise SchemaError("must be >= 0", line=line, field="timestamp")
    rt = _opt_str(obj, "retweet_of_user", line)
    if rt == user:
        raise SchemaError("a user cannot retweet themselves", line=line, field="retweet_of_user")
    return Tweet(id=tid, user_id=user, timestamp=int(ts),
                 urls=tuple(_url_list(obj, "urls", line)), retweet_of_user=rt)


def _parse_factcheck(obj, line) -> FactCheckEntry:
    urls = _url_list(obj, "claim_urls", line)
    title = obj.get("title", "") or ""
    if not isinstance(title, str):
        raise SchemaError("expected a string", line=line, field="title")
    if not urls and not title.strip():
        raise SchemaError("one of claim_urls/title must be non-empty", line=line, field="claim_urls")
    verdict = _req_str(obj, "verdict", line)
    if verdict not in FACTCHECK_VERDICTS:
        raise SchemaError(f"verdict must be one of {FACTCHECK_VERDICTS}", line=line, field="verdict")
    date = _req_str(obj, "date", line)
    try:
        _dt.date.fromisoformat(date)
    except ValueError:
        raise SchemaError("expected an ISO date", line=line, field="date") from None
    return FactCheckEntry(
        claim_urls=tuple(normalize_url(u) for u in urls),
        title=title,
        verdict=verdict,
        source=_req_str(obj, "source", line, allow_empty=True),
        date=date,
    )


def _parse_blacklist(obj, line) -> BlacklistRecord:
    score = obj.get("score")
    if isinstance(score, bool) or not isinstance(score, (int, float)) or not 0.0 <= score <= 1.0:
        raise SchemaError("expected a number in [0, 1]", line=line, field="score")
    seen = obj.get("sessions_seen")
    if isinstance(seen, bool) or not isinstance(seen, int) or seen < 1:
        raise SchemaError("expected a positive integer", line=line, field="sessions_seen")
    return BlacklistRecord(
        user_id=_req_str(obj, "user_id", line),
        score=float(score),
        band=_req_str(obj, "band", line),
        sessions_seen=seen,
    )


def _flag_entry(domain, labels, source, line) -> FlagListEntry:
    if not isinstance(domain, str) or not domain.strip():
        raise SchemaError("must be non-empty", line=line, field="domain")
    try:
        host = normalize_domain(domain)
    except URLError as exc:
        raise SchemaError(str(exc), line=line, field="domain") from None
    if isinstance(labels, str):
        labels = [p for p in labels.replace("|", ";").split(";")]
    try:
        canon = frozenset(canonical_flag_label(lab) for lab in labels if lab and lab.strip())
    except (ValueError, AttributeError) as exc:
        raise SchemaError(str(exc), line=line, field="label") from None
    if not canon:
        raise SchemaError("at least one label required", line=line, field="label")
    return FlagListEntry(domain=host, labels=canon, source=source or "")


def _parse_flaglist(text: str) -> list[FlagListEntry]:
    stripped = text.lstrip()
    if not stripped:
        return []
    if stripped[0] in "[{":
        return _parse_flaglist_json(text)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return []
    header = [h.strip().lower() for h in header]
    for name in ("domain", "label"):
        if name not in header:
            raise SchemaError("CSV header must contain domain,label,source", line=1, field=name)
    idx = {name: header.index(name) for name in header}
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} columns, got {len(row)}", line=lineno)
        source = row[idx["source"]].strip() if "source" in idx else ""
        out.append(_flag_entry(row[idx["domain"]].strip(), row[idx["label"]], source, lineno))
    return out


def _parse_flaglist_json(text: str) -> list[FlagListEntry]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = None
    if isinstance(doc, dict) and "domain" not in doc:
        # mapping form: {"domain": {"labels": [...]} | {"type": ..., "2nd type": ...}}
        out = []
        for domain, info in doc.items():
            if isinstance(info, dict):
                if "labels" in info:
                    labels = info["labels"]
                else:
                    labels = [v for k, v in info.items() if "type" in k and v]
                source = info.get("source", "")
            else:
                labels, source = info, ""
            out.append(_flag_entry(domain, labels, source, None))
        return out
    records = doc if isinstance(doc, list) else None
    if records is None:
        return [_flag_record(obj, line) for line, obj in _json_lines(text)]
    return [_flag_record(obj, i + 1) for i, obj in enumerate(records)]


def _flag_record(obj, line) -> FlagListEntry:
    if not isinstance(obj, dict):
        raise SchemaError("record must be an object", line=line)
    labels = obj.get("labels", obj.get("label"))
    return _flag_entry(obj.get("domain"), labels if labels is not None else [], obj.get("source", ""), line)


def _parse_lexicon(text: str, lexicon_kind: str) -> list[LexiconEntry]:
    if lexicon_kind not in LEXICON_KINDS:
        raise SchemaError(f"unknown lexicon kind {lexicon_kind!r}")
    out = []
    for lineno, raw in enumerate(_lines(text), start=1):
        line = raw.strip()
        # Hu & Liu lexicon files carry ';' comment headers
        if not line or line.startswith(";") or line.startswith("#"):
            continue
        if lexicon_kind == "afinn":
            parts = raw.rstrip("\r\n").rsplit("\t", 1)
            if len(parts) != 2:
                raise SchemaError("expected word<TAB>valence", line=lineno)
            word, val = parts[0].strip().lower(), parts[1].strip()
            try:
                valence = int(val)
            except ValueError:
                raise SchemaError(f"valence {val!r} is not an integer", line=lineno, field="valence") from None
            if not -5 <= valence <= 5:
                raise SchemaError("valence outside [-5, 5]", line=lineno, field="valence")
        else:
            word, valence = line.lower(), 1
        if not word:
            raise SchemaError("empty word", line=lineno, field="word")
        out.append(LexiconEntry(word, valence))
    return out


_RECORD_PARSERS = {
    "articles": _parse_article,
    "tweets": _parse_tweet,
    "factchecks": _parse_factcheck,
    "blacklist": _parse_blacklist,
}


def parse_resource(kind: str, stream: ByteSource, *, lexicon_kind: Optional[str] = None) -> list:
    """Parse ``stream`` into validated records of ``kind``.

    Raises :class:`SchemaError` on the first malformed record; nothing is
    returned for a partially valid input. Empty input gives an empty list.
    """
    if kind not in RESOURCE_KINDS:
        raise SchemaError(f"unknown resource kind {kind!r}")
    text = _read_text(stream)
    if kind == "flaglist":
        return _parse_flaglist(text)
    if kind == "lexicon":
        if lexicon_kind is None:
            raise SchemaError("lexicon_kind is required for kind 'lexicon'")
        return _parse_lexicon(text, lexicon_kind)
    parser = _RECORD_PARSERS[kind]
    return [parser(obj, line) for line, obj in _json_lines(text)]


def load_lexicon(lexicon_kind: str, stream: ByteSource) -> Lexicon:
    entries = parse_resource("lexicon", stream, lexicon_kind=lexicon_kind)
    return Lexicon(lexicon_kind, {e.word: e.valence for e in entries})


# --------------------------------------------------------------------------
# serialization (inverse of parse_resource)

def _record_dict(rec) -> dict[str, Any]:
    if isinstance(rec, Article):
        return {"id": rec.id, "url": rec.url, "headline": rec.headline, "body": rec.body,
                "author_handle": rec.author_handle, "label": rec.label}
    if isinstance(rec, Tweet):
        return {"id": rec.id, "user_id": rec.user_id, "timestamp": rec.timestamp,
                "urls": list(rec.urls), "retweet_of_user": rec.retweet_of_user}
    if isinstance(rec, FactCheckEntry):
        return {"claim_urls": ["http://" + u for u in rec.claim_urls], "title": rec.title,
                "verdict": rec.verdict, "source": rec.source, "date": rec.date}
    if isinstance(rec, BlacklistRecord):
        return {"user_id": rec.user_id, "score": rec.score, "band": rec.band,
                "sessions_seen": rec.sessions_seen}
    raise TypeError(f"cannot serialize {type(rec).__name__}")


def dump_records(kind: str, records: Iterable) -> bytes:
    """Serialize records in the documented on-disk format for ``kind``."""
    records = list(records)
    if kind == "flaglist":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["domain", "label", "source"])
        for e in records:
            writer.writerow([e.domain, ";".join(sorted(e.labels)), e.source])
        return buf.getvalue().encode("utf-8")
    if kind == "lexicon":
        # a membership lexicon stores valence 1 everywhere
        signed = any(e.valence != 1 for e in records)
        lines = [f"{e.word}\t{e.valence}" if signed else e.word for e in records]
        return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
    if kind not in _RECORD_PARSERS:
        raise ValueError(f"unknown resource kind {kind!r}")
    lines = [json.dumps(_record_dict(r), sort_keys=True, ensure_ascii=False) for r in records]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def dump_lexicon(lexicon: Lexicon) -> bytes:
    words = sorted(lexicon.entries)
    if lexicon.kind == "afinn":
        text = "".join(f"{w}\t{lexicon.entries[w]}\n" for w in words)
    else:
        text = "".join(f"{w}\n" for w in words)
    return text.encode("utf-8")


# --------------------------------------------------------------------------
# resource packages

PACKAGE_COMPONENT_KINDS = ("flaglist", "factchecks", "blacklist", "model")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class ValidationReport:
    status: str
    components: list[dict[str, Any]]
    versions: dict[str, Any]
    parsed: dict[str, Any] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "components": self.components, "versions": self.versions}


def validate_package(manifest: Mapping[str, Any], files: Mapping[str, bytes]) -> ValidationReport:
    """Check that every manifest component exists, matches its digest and parses.

    ``files`` maps component paths (as written in the manifest) to bytes.
    """
    for key in ("version", "created_at", "components"):
        if key not in manifest:
            raise PackageError(f"manifest missing field {key!r}")
    comps = manifest["components"]
    if not isinstance(comps, list) or not comps:
        raise PackageError("manifest lists no components")
    summary, parsed = [], {}
    versions: dict[str, Any] = {"package": manifest["version"]}
    for comp in comps:
        for key in ("name", "path", "kind", "sha256"):
            if key not in comp:
                raise PackageError(f"component entry missing field {key!r}")
        name, path, kind = comp["name"], comp["path"], comp["kind"]
        if path not in files:
            raise PackageError(f"missing file for component {name!r}: {path}")
        data = files[path]
        if sha256_hex(data) != comp["sha256"]:
            raise PackageError(f"digest mismatch for {path}")
        if kind == "model":
            from .dnn.serialize import deserialize_model

            model = deserialize_model(data)
            parsed[name] = model
            versions["model_format"] = model.format_version
            count = 1
        elif kind in RESOURCE_KINDS and kind != "lexicon":
            try:
                records = parse_resource(kind, data)
            except SchemaError as exc:
                raise SchemaError(f"{path}: {exc}", line=exc.line, field=exc.field) from None
            parsed[name] = records
            count = len(records)
        else:
            raise PackageError(f"unknown component kind {kind!r} for {name!r}")
        summary.append({"name": name, "kind": kind, "path": path, "records": count})
    for key in ("catalog_version", "threshold"):
        if key in manifest:
            versions[key] = manifest[key]
    return ValidationReport("ok", summary, versions, parsed)
