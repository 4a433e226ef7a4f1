"""Signal orchestration, verdicts and resource packages.

A package directory holds ``manifest.json`` plus one file per component.
Scoring walks the signals in a fixed precedence and stops at the first one
that calls the article fake.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import shutil
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from .credibility import FlagIndex, factcheck_lookup
from .dnn.model import ModelError, ModelParams, predict
from .dnn.serialize import deserialize_model, serialize_model
from .ingest import (
    Article, BlacklistRecord, FactCheckEntry, FlagListEntry, PackageError, dump_records, sha256_hex,
    validate_package,
)
from .osn import UserBlacklist
from .text.catalog import FeatureCatalog, catalog_for_version, extract_features, top20_catalog
from .text.lexicons import LexiconError, LexiconSet, default_lexicons
from .urls import URLError, normalize_domain

PACKAGE_VERSION = "1"
DEFAULT_THRESHOLD = 0.99
SIGNALS = ("flaglist", "factcheck", "user-blacklist", "linguistic")
MANIFEST = "manifest.json"
COMPONENT_PATHS = {
    "flaglist": "flaglist.csv",
    "factchecks": "factchecks.jsonl",
    "blacklist": "blacklist.jsonl",
    "model": "model.bin",
}


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    precedence: tuple[str, ...] = SIGNALS
    sim_threshold: float = 0.8
    fake_verdicts: tuple[str, ...] = ("fake",)

    def __post_init__(self):
        unknown = set(self.precedence) - set(SIGNALS)
        if unknown:
            raise ValueError(f"unknown signals in precedence: {sorted(unknown)}")


@dataclass
class Verdict:
    article_id: str
    outcome: str  # fake | suspicious | unverified
    signal: str  # flaglist | factcheck | user-blacklist | linguistic | none
    confidence: float
    explanation: str
    components: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "article_id": self.article_id, "outcome": self.outcome, "signal": self.signal,
            "confidence": self.confidence, "explanation": self.explanation,
            "components": self.components,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    def pretty(self) -> str:
        return f"{self.article_id}: {self.outcome.upper()} [{self.signal}, {self.confidence:.3f}] {self.explanation}"


def _check_threshold(tau: float) -> float:
    tau = float(tau)
    if not 0.5 <= tau <= 0.99:
        raise PackageError(f"threshold {tau} outside [0.5, 0.99]")
    return tau


@dataclass
class ResourcePackage:
    """Loaded, validated and immutable bundle of scoring resources."""

    manifest: dict[str, Any]
    flags: FlagIndex
    factchecks: list[FactCheckEntry]
    blacklist: UserBlacklist
    model: ModelParams
    threshold: float
    catalog: FeatureCatalog
    lexicons: Optional[LexiconSet] = None

    @classmethod
    def from_files(cls, manifest: Mapping[str, Any], files: Mapping[str, bytes],
                   lexicons: Optional[LexiconSet] = None) -> "ResourcePackage":
        report = validate_package(manifest, files)
        kinds = {c["name"]: c["kind"] for c in manifest["components"]}
        flaglists, by_kind = [], {}
        for name, value in report.parsed.items():
            if kinds[name] == "flaglist":
                flaglists.append(value)
            else:
                by_kind[kinds[name]] = value
        if "model" not in by_kind:
            raise PackageError("package has no model component")
        catalog = _manifest_catalog(manifest)
        model = by_kind["model"]
        if model.input_dim != len(catalog):
            raise PackageError(f"model expects {model.input_dim} features, catalog has {len(catalog)}")
        return cls(
            manifest=dict(manifest),
            flags=FlagIndex(flaglists),
            factchecks=list(by_kind.get("factchecks", [])),
            blacklist=UserBlacklist.from_records(by_kind.get("blacklist", [])),
            model=model,
            threshold=_check_threshold(manifest.get("threshold", DEFAULT_THRESHOLD)),
            catalog=catalog,
            lexicons=lexicons,
        )

    @classmethod
    def load(cls, directory: Union[str, os.PathLike], lexicons: Optional[LexiconSet] = None) -> "ResourcePackage":
        root = Path(directory)
        try:
            manifest = json.loads((root / MANIFEST).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise PackageError(f"no {MANIFEST} in {root}") from None
        except json.JSONDecodeError as exc:
            raise PackageError(f"unreadable manifest: {exc}") from None
        files = {}
        for comp in manifest.get("components", []):
            path = root / comp.get("path", "")
            if path.is_file():
                files[comp["path"]] = path.read_bytes()
        return cls.from_files(manifest, files, lexicons)


def _manifest_catalog(manifest: Mapping[str, Any]) -> FeatureCatalog:
    version = manifest.get("catalog_version")
    if version is None:
        raise PackageError("manifest has no catalog_version")
    if "catalog" in manifest:
        return FeatureCatalog.from_labels(manifest["catalog"], version=version)
    try:
        return catalog_for_version(version)
    except ValueError as exc:
        raise PackageError(str(exc)) from None


# --------------------------------------------------------------------------
# scoring

def _flag_explanation(host: str, m) -> str:
    labels = ", ".join(sorted(m.entry.labels))
    how = "is" if m.match_kind == "exact-host" else f"is a subdomain of {m.entry.domain}, which is"
    src = f" by {m.entry.source}" if m.entry.source else ""
    return f"domain {host} {how} flag-listed{src} as {labels}"


def score_article(article: Article, pkg: ResourcePackage, config: Optional[PipelineConfig] = None) -> Verdict:
    cfg = config or PipelineConfig()
    comps: dict[str, Any] = {}
    suspicious: Optional[Verdict] = None
    reason = "no signal reached a confident fake verdict"
    for signal in cfg.precedence:
        if signal == "flaglist":
            try:
                host = normalize_domain(article.url)
            except URLError:
                comps["flaglist"] = {"matched": False, "error": "unparseable url"}
                continue
            m = pkg.flags.match(host)
            comps["flaglist"] = m.to_dict()
            if m.matched:
                return Verdict(article.id, "fake", "flaglist", 1.0, _flag_explanation(host, m), comps)
        elif signal == "factcheck":
            entries = [e for e in pkg.factchecks if e.verdict in cfg.fake_verdicts]
            m = factcheck_lookup(article, entries, cfg.sim_threshold,
                                 (pkg.lexicons or default_lexicons()).stopwords.entries)
            comps["factcheck"] = m.to_dict()
            if m.matched:
                how = "claim URL" if m.match_kind == "exact-url" else f"headline (similarity {m.similarity:.2f})"
                expl = f"{how} matches a {m.entry.verdict} ruling by {m.entry.source or 'a fact checker'}"
                return Verdict(article.id, "fake", "factcheck", 1.0, expl, comps)
        elif signal == "user-blacklist":
            handle = article.author_handle
            entry = pkg.blacklist.entries.get(handle) if handle else None
            comps["user-blacklist"] = {"matched": entry is not None, "user_id": handle,
                                       "score": entry.score if entry else None}
            if entry is not None:
                suspicious = Verdict(article.id, "suspicious", "user-blacklist", float(entry.score),
                                     f"author {handle} is blacklisted with falsity score {entry.score:.3f}")
        elif signal == "linguistic":
            if not article.body.strip():
                reason = "insufficient content"
                comps["linguistic"] = {"skipped": reason}
                continue
            try:
                x = extract_features(article, pkg.catalog, pkg.lexicons).values
            except LexiconError as exc:
                raise PipelineError(f"feature extraction failed for {article.id}: {exc}") from None
            pred = predict(pkg.model, x, pkg.threshold)[0]
            comps["linguistic"] = {"p_real": pred.p_real, "p_fake": pred.p_fake, "threshold": pkg.threshold}
            if pred.p_fake >= pkg.threshold:
                expl = f"linguistic model gives p_fake {pred.p_fake:.4f} >= threshold {pkg.threshold}"
                return Verdict(article.id, "fake", "linguistic", pred.p_fake, expl, comps)
            reason = f"linguistic model gives p_fake {pred.p_fake:.4f} below threshold {pkg.threshold}"
    if suspicious is not None:
        suspicious.components = comps
        return suspicious
    return Verdict(article.id, "unverified", "none", 0.0, reason, comps)


def score_batch(articles: Sequence[Article], pkg: ResourcePackage, config: Optional[PipelineConfig] = None,
                workers: int = 1) -> list[Verdict]:
    """Score many articles; output order always follows input order."""
    if workers <= 1:
        return [score_article(a, pkg, config) for a in articles]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: score_article(a, pkg, config), articles))


# --------------------------------------------------------------------------
# packaging

def package_files(
    flaglists: Iterable[Iterable[FlagListEntry]],
    factchecks: Iterable[FactCheckEntry],
    blacklist: Union[UserBlacklist, Iterable[BlacklistRecord]],
    model: Union[ModelParams, bytes],
    threshold: float = DEFAULT_THRESHOLD,
    catalog: Optional[FeatureCatalog] = None,
    created_at: Optional[str] = None,
) -> tuple[dict[str, Any], dict[str, bytes]]:
    """Build ``(manifest, files)`` in memory, validating every component."""
    catalog = catalog or top20_catalog()
    try:
        if isinstance(model, (bytes, bytearray)):
            model = deserialize_model(model)
        model_bytes = serialize_model(model)
    except ModelError as exc:
        raise PackageError(f"invalid model: {exc}") from None
    if model.input_dim != len(catalog):
        raise PackageError(f"model expects {model.input_dim} features, catalog has {len(catalog)}")
    records = blacklist.records() if isinstance(blacklist, UserBlacklist) else list(blacklist)
    entries = [e for lst in flaglists for e in lst]
    files = {
        COMPONENT_PATHS["flaglist"]: dump_records("flaglist", entries),
        COMPONENT_PATHS["factchecks"]: dump_records("factchecks", factchecks),
        COMPONENT_PATHS["blacklist"]: dump_records("blacklist", records),
        COMPONENT_PATHS["model"]: model_bytes,
    }
    if created_at is None:
        created_at = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()
    manifest = {
        "version": PACKAGE_VERSION,
        "created_at": created_at,
        "threshold": _check_threshold(threshold),
        "catalog_version": catalog.version,
        "components": [
            {"name": kind, "kind": kind, "path": path, "sha256": sha256_hex(files[path])}
            for kind, path in COMPONENT_PATHS.items()
        ],
    }
    try:
        catalog_for_version(catalog.version)
    except ValueError:
        manifest["catalog"] = catalog.labels
    validate_package(manifest, files)
    return manifest, files


def pack_resources(out_dir: Union[str, os.PathLike], *args, **kwargs) -> dict[str, Any]:
    """Write a package directory atomically; nothing is left behind on failure.

    Arguments after ``out_dir`` are those of :func:`package_files`. Returns the
    manifest. ``out_dir`` must not exist yet or be empty.
    """
    out = Path(out_dir)
    if out.exists() and (not out.is_dir() or any(out.iterdir())):
        raise PackageError(f"{out} already exists and is not an empty directory")
    manifest, files = package_files(*args, **kwargs)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".pack-", dir=out.parent))
    try:
        for path, data in files.items():
            (tmp / path).write_bytes(data)
        (tmp / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        if out.exists():
            out.rmdir()
        os.replace(tmp, out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return manifest
