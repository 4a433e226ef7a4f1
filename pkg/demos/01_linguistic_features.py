"""Linguistic features of two short articles, side by side."""

# %% Two articles with very different styles
from checkit.ingest import Article
from checkit.text.catalog import extract_features, full_catalog, top20_catalog
from checkit.text.features import readability_indexes, text_features
from checkit.text.tokenize import tokenize

calm = Article("calm", "http://citynews.example/budget", "Council approves new budget",
               "The council approved the budget on Tuesday. Spending on schools rises by four percent. "
               "Members debated the plan for two hours before the vote.")
loud = Article("loud", "http://dailyhoax.example/secret", "THEY DON'T WANT YOU TO KNOW THIS!!!",
               "Wake up! The elites lie about everything... This is a disaster! "
               "Nobody will tell you the truth, but we will!!!")

# %% Readability of each body
for a in (calm, loud):
    r = readability_indexes(tokenize(a.body))
    print(f"{a.id:5s} FK={r['flesch_kincaid']:6.2f}  fog={r['gunning_fog']:6.2f}  smog={r['smog']:6.2f}")

# %% A handful of raw body features
raw = {a.id: text_features(a.body) for a in (calm, loud)}
for name in ("exclamation_count", "avg_afinn", "type_token_ratio", "proper_noun_count"):
    print(f"{name:20s} calm={raw['calm'][name]:.3f} loud={raw['loud'][name]:.3f}")

# %% The compact 20-feature vector used by the classifier
top = top20_catalog()
vc, vl = extract_features(calm, top).values, extract_features(loud, top).values
for d, a, b in zip(top, vc, vl):
    print(f"{d.name[:48]:48s} {d.scope:8s} {a:9.3f} {b:9.3f}")

# %% The full catalog has one column per (feature, scope)
print(len(full_catalog()), "features in the full catalog")
