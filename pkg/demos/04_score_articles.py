"""Bundle flag-lists, fact checks, a blacklist and a model, then score articles."""

# %% Resources, built in code for the demo
import tempfile
from pathlib import Path

import numpy as np

from checkit.dnn import TrainingConfig, train
from checkit.ingest import Article, BlacklistRecord, FactCheckEntry, FlagListEntry
from checkit.pipeline import ResourcePackage, pack_resources, score_batch
from checkit.text.catalog import extract_matrix, top20_catalog

flags = [FlagListEntry("dailyhoax.example", frozenset({"fake news"}), "demo-list")]
checks = [FactCheckEntry((), "Moon landing was staged in a studio", "fake", "demo-checker", "2019-07-20")]
blacklist = [BlacklistRecord("u007", 0.91, "ultra-high", 12)]

# %% A toy classifier: shouting headlines were labelled fake
words = "market council river school doctor garden budget season festival library".split()
rng = np.random.default_rng(3)
corpus = []
for i in range(200):
    head = " ".join(rng.choice(words, 4))
    fake = i % 2 == 1
    corpus.append(Article(f"c{i}", f"http://site{i}.example/", head.upper() + "!!!" if fake else head.capitalize(),
                          "The report was read aloud. " * (2 + i % 3)))
catalog = top20_catalog()
X = extract_matrix(corpus, catalog)
model, _ = train(X, np.arange(200) % 2, TrainingConfig(max_epochs=20, seed=0))

# %% Write the package
out = Path(tempfile.mkdtemp()) / "package"
manifest = pack_resources(out, [flags], checks, blacklist, model, threshold=0.99)
print("package at", out)
for c in manifest["components"]:
    print(f"  {c['path']:18s} {c['sha256'][:16]}...")

# %% Score a mixed batch
articles = [
    Article("1", "https://www.dailyhoax.example/x", "Anything", "Body."),
    Article("2", "http://news.example/moon", "Moon landing was staged in a studio", "Body."),
    Article("3", "http://news.example/a", "Quiet garden season", "The report was read aloud.", "u007"),
    Article("4", "http://news.example/b", "DOCTOR BUDGET RIVER SCHOOL!!!", "The report was read aloud."),
    Article("5", "http://news.example/c", "Library festival returns", "The report was read aloud."),
    Article("6", "http://news.example/d", "Headline only", ""),
]
for v in score_batch(articles, ResourcePackage.load(out)):
    print(v.pretty())
