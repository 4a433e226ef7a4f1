"""Command line entry point: ``checkit <command> ...``.

Exit status is 0 on success, 1 when an input fails validation and 2 on any
other runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2
LEXICON_HELP = "replace a bundled lexicon (afinn, positive-opinion, negative-opinion, moral-foundation, stopwords)"


def _read_bytes(path: str) -> bytes:
    return sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_bytes(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(path).write_bytes(data)


def _load(kind: str, path: str):
    from .ingest import parse_resource

    return parse_resource(kind, _read_bytes(path))


def _labels_to_ints(labels):
    from .selection.steps import LABEL_CODES

    if labels is None or any(lab == "" for lab in labels):
        raise ValueError("this command needs a labelled feature matrix")
    try:
        return np.array([LABEL_CODES[lab] for lab in labels], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"unknown label {exc.args[0]!r}") from None


def _read_matrix(path: str):
    from .text.catalog import read_matrix

    return read_matrix(_read_bytes(path).decode("utf-8"))


def _catalog_arg(value: str):
    """A built-in catalog version, or a JSON file of labels / a selection report."""
    from .text.catalog import FeatureCatalog, catalog_for_version

    try:
        return catalog_for_version(value)
    except ValueError:
        pass
    data = json.loads(Path(value).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        labels = [f"{d['name']}@{d['scope']}" for d in data["final_catalog"]]
    else:
        labels = list(data)
    return FeatureCatalog.from_labels(labels, version="selected")


def _lexicons(pairs):
    """``KIND=PATH`` overrides of the bundled lexicons, or None."""
    from .text.lexicons import load_lexicons

    if not pairs:
        return None
    paths = {}
    for pair in pairs:
        kind, sep, path = pair.partition("=")
        if not sep or not path:
            raise ValueError(f"--lexicon expects KIND=PATH, got {pair!r}")
        paths[kind] = path
    return load_lexicons(paths)


def _training_config(args):
    from .dnn.training import TrainingConfig

    return TrainingConfig(
        max_epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.learning_rate,
        patience=args.patience, validation_fraction=args.validation_fraction, folds=args.folds,
        seed=args.seed, class_weight=args.class_weight,
    )


# --------------------------------------------------------------------------
# commands

def cmd_extract(args) -> int:
    from .ingest import parse_resource
    from .text.catalog import catalog_for_version, extract_matrix, write_matrix

    articles = parse_resource("articles", _read_bytes(args.articles))
    catalog = catalog_for_version(args.catalog)
    X = extract_matrix(articles, catalog, _lexicons(args.lexicon))
    labels = [a.label or "" for a in articles] if any(a.label for a in articles) else None
    _write(args.output, write_matrix(catalog, X, labels))
    return EXIT_OK


def cmd_select(args) -> int:
    from .selection import FeatureMatrix, GBDTConfig, SelectionConfig, run_selection

    catalog, X, labels = _read_matrix(args.matrix)
    m = FeatureMatrix(catalog, X, _labels_to_ints(labels))
    cfg = SelectionConfig(missing_threshold=args.missing_threshold, r_threshold=args.r_threshold,
                          importance_mass=args.importance_mass, top_k=args.top_k,
                          gbdt=GBDTConfig(seed=args.seed))
    report = run_selection(m, cfg)
    _write(args.output, report.to_json() + "\n")
    if args.catalog_out:
        _write(args.catalog_out, json.dumps(report.final_catalog.labels, indent=2) + "\n")
    return EXIT_OK


def cmd_train(args) -> int:
    from .dnn import serialize_model, train

    _, X, labels = _read_matrix(args.matrix)
    model, hist = train(X, _labels_to_ints(labels), _training_config(args))
    _write_bytes(args.output, serialize_model(model))
    if args.history:
        _write(args.history, json.dumps(hist.to_dict(), indent=2) + "\n")
    print(f"trained {len(hist.train_loss)} epochs, best epoch {hist.best_epoch}", file=sys.stderr)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    from .dnn import calibrate_threshold, deserialize_model

    model = deserialize_model(_read_bytes(args.model))
    _, X, labels = _read_matrix(args.matrix)
    report = calibrate_threshold(model, X, _labels_to_ints(labels))
    _write(args.output, report.to_csv())
    print(json.dumps({"threshold": report.chosen}), file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .dnn import cross_validate, deserialize_model, evaluate

    _, X, labels = _read_matrix(args.matrix)
    y = _labels_to_ints(labels)
    if args.model is None:
        result = cross_validate(X, y, _training_config(args), args.threshold)
    else:
        result = evaluate(deserialize_model(_read_bytes(args.model)), X, y, args.threshold)
    _write(args.output, json.dumps(result, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_score(args) -> int:
    from .pipeline import ResourcePackage, score_batch

    pkg = ResourcePackage.load(args.package, _lexicons(args.lexicon))
    articles = _load("articles", args.articles)
    verdicts = score_batch(articles, pkg, workers=args.threads)
    render = (lambda v: v.pretty()) if args.pretty else (lambda v: v.to_json())
    _write(args.output, "".join(render(v) + "\n" for v in verdicts))
    return EXIT_OK


def _flag_index(paths):
    from .credibility import FlagIndex

    return FlagIndex([_load("flaglist", p) for p in paths])


def _blacklist_state(args):
    from .osn import build_blacklist

    return build_blacklist(_load("tweets", args.tweets), _flag_index(args.flaglist), alpha=args.alpha,
                           seed_retweeters=args.seed_retweeters, workers=args.threads)


def cmd_blacklist_build(args) -> int:
    from .ingest import dump_records

    state = _blacklist_state(args)
    _write_bytes(args.output, dump_records("blacklist", state.blacklist().records()))
    return EXIT_OK


def cmd_blacklist_report(args) -> int:
    from .osn import frequency_report, report_csv

    state = _blacklist_state(args)
    rows = frequency_report(_load("tweets", args.tweets), state.bands(), _flag_index(args.flaglist), args.days)
    _write(args.output, report_csv(rows))
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .ingest import dump_records
    from .simulate import StreamConfig, simulate_stream

    cfg = StreamConfig(users=args.users, days=args.days, spreader_fraction=args.spreader_fraction,
                       base_rate=args.base_rate, fake_rate_multiplier=args.fake_rate_multiplier,
                       retweet_probability=args.retweet_probability,
                       spreader_attraction=args.spreader_attraction, seed=args.seed)
    stream = simulate_stream(cfg)
    _write_bytes(args.output, dump_records("tweets", stream.tweets))
    if args.flaglist_out:
        _write_bytes(args.flaglist_out, dump_records("flaglist", stream.flaglist))
    if args.truth_out:
        _write(args.truth_out, "".join(u + "\n" for u in sorted(stream.spreaders)))
    return EXIT_OK


def cmd_pack(args) -> int:
    from .pipeline import pack_resources

    flaglists = [_load("flaglist", p) for p in args.flaglist]
    factchecks = _load("factchecks", args.factchecks) if args.factchecks else []
    blacklist = _load("blacklist", args.blacklist) if args.blacklist else []
    manifest = pack_resources(args.output, flaglists, factchecks, blacklist, _read_bytes(args.model),
                              args.threshold, _catalog_arg(args.catalog), args.created_at)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_check_domain(args) -> int:
    from .urls import normalize_domain

    host = normalize_domain(args.url)
    m = _flag_index(args.flaglist).match(host)
    print(json.dumps({"host": host, **m.to_dict()}, sort_keys=True))
    return EXIT_OK


def cmd_check_claim(args) -> int:
    from .credibility import factcheck_lookup
    from .ingest import Article

    if not args.url and not args.title:
        raise ValueError("give --url, --title or both")
    article = Article("claim", args.url or "", args.title or "", "")
    m = factcheck_lookup(article, _load("factchecks", args.factchecks), args.sim_threshold)
    print(json.dumps(m.to_dict(), sort_keys=True))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser

def _add_training(p) -> None:
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--learning-rate", type=float, default=0.001)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--validation-fraction", type=float, default=0.1)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--class-weight", choices=["balanced"], default=None)


def _add_osn(p) -> None:
    p.add_argument("--tweets", required=True)
    p.add_argument("--flaglist", action="append", required=True)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--seed-retweeters", action="store_true")
    p.add_argument("-o", "--output", default="-")


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation errors (exit 1), not argparse's exit 2
    def error(self, message):
        raise ValueError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    parser = _Parser(prog="checkit", description="Offline fake-news screening toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", help="JSON object whose keys override option defaults")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for batch work")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="articles -> feature matrix CSV")
    p.add_argument("--articles", required=True)
    p.add_argument("--catalog", default="top20-v1", choices=["top20-v1", "full534-v1"])
    p.add_argument("--lexicon", action="append", metavar="KIND=PATH", help=LEXICON_HELP)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("select", help="feature matrix -> selection report")
    p.add_argument("--matrix", required=True)
    p.add_argument("--missing-threshold", type=float, default=0.60)
    p.add_argument("--r-threshold", type=float, default=0.975)
    p.add_argument("--importance-mass", type=float, default=0.95)
    p.add_argument("--top-k", type=int, default=20)
    p.add_argument("--catalog-out")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", help="train the classifier on a labelled matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--history")
    _add_training(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("calibrate", help="sweep the fake-probability threshold")
    p.add_argument("--model", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("evaluate", help="metrics of a model, or k-fold cross-validation without one")
    p.add_argument("--matrix", required=True)
    p.add_argument("--model")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("-o", "--output")
    _add_training(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("score", help="articles + package -> verdicts")
    p.add_argument("--articles", required=True)
    p.add_argument("--package", required=True)
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--lexicon", action="append", metavar="KIND=PATH", help=LEXICON_HELP)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("blacklist", help="user blacklist from a tweet stream")
    bsub = p.add_subparsers(dest="blacklist_command", required=True)
    b = bsub.add_parser("build")
    _add_osn(b)
    b.set_defaults(func=cmd_blacklist_build)
    b = bsub.add_parser("report")
    _add_osn(b)
    b.add_argument("--days", type=float)
    b.set_defaults(func=cmd_blacklist_report)

    p = sub.add_parser("simulate", help="synthetic tweet stream with known spreaders")
    p.add_argument("--users", type=int, default=100)
    p.add_argument("--days", type=int, default=7)
    p.add_argument("--spreader-fraction", type=float, default=0.1)
    p.add_argument("--base-rate", type=float, default=12.0)
    p.add_argument("--fake-rate-multiplier", type=float, default=5.0)
    p.add_argument("--retweet-probability", type=float, default=0.2)
    p.add_argument("--spreader-attraction", type=float, default=3.0)
    p.add_argument("--flaglist-out")
    p.add_argument("--truth-out")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pack", help="bundle resources into a package directory")
    p.add_argument("--flaglist", action="append", default=[])
    p.add_argument("--factchecks")
    p.add_argument("--blacklist")
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, default=0.99)
    p.add_argument("--catalog", default="top20-v1")
    p.add_argument("--created-at")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("check-domain", help="look up one URL in flag-lists")
    p.add_argument("url")
    p.add_argument("--flaglist", action="append", required=True)
    p.set_defaults(func=cmd_check_domain)

    p = sub.add_parser("check-claim", help="look up one claim in fact checks")
    p.add_argument("--url")
    p.add_argument("--title")
    p.add_argument("--factchecks", required=True)
    p.add_argument("--sim-threshold", type=float, default=0.8)
    p.set_defaults(func=cmd_check_claim)
    return parser


def _apply_config(parser: argparse.ArgumentParser, config: dict) -> None:
    """Push config values in as defaults on every parser that knows the option."""
    stack = [parser]
    while stack:
        p = stack.pop()
        dests = {a.dest for a in p._actions}
        p.set_defaults(**{k.replace("-", "_"): v for k, v in config.items() if k.replace("-", "_") in dests})
        for a in p._actions:
            if isinstance(a, argparse._SubParsersAction):
                stack.extend(a.choices.values())


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre, _ = parser.parse_known_args(argv) if "--config" in argv else (None, None)
        if pre is not None and pre.config:
            config = json.loads(Path(pre.config).read_text(encoding="utf-8"))
            if not isinstance(config, dict):
                raise ValueError("config file must hold a single JSON object")
            _apply_config(parser, config)
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise ValueError("--threads must be >= 1")
        return args.func(args)
    except (ValueError, LookupError) as exc:
        print(f"checkit: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"checkit: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
