"""Training and comparing the three multi-label classifiers.

Run with ``python3 demos/classification_and_tuning.py``.  Takes a few seconds.
"""

# %% [markdown]
# # Multi-label classification
#
# Documents are turned into TF-IDF vectors over unigrams and bigrams.  Three
# schemes then decide which categories a document gets:
#
# * one-vs-all: one binary SVM per category, keep categories scoring above theta
# * MetaLabeler: the same binary SVMs plus a multiclass SVM that predicts how
#   many labels to keep
# * pruned sets: rare label combinations are pruned or broken into frequent
#   subsets, then an ensemble of multiclass SVMs votes on whole label sets

# %%
import tempfile
from pathlib import Path

from lexboot.bootstrap import Thresholds, bootstrap_modified
from lexboot.evaluation import count, micro_prf
from lexboot.multilabel import (Scheme, cross_validate_predictions, load_model,
                                prune_label_sets, save_model, tune)
from lexboot.patterns import build_index
from lexboot.synthetic import split_ids, synthetic_corpus, synthetic_seeds

docs = synthetic_corpus(600, n_categories=4, seed=11, noise=0.35)
train, dev, test = split_ids(docs, [0.6, 0.2, 0.2], seed=0)
cats = sorted({c for d in docs for c in d.labels})
gold = {d.id: d.labels for d in test}
print(len(train), "train,", len(dev), "dev,", len(test), "test documents")


def score(preds):
    p, r, f = micro_prf(count(preds, gold, cats))
    return f"P={100 * p:5.1f} R={100 * r:5.1f} F={100 * f:5.1f}"


# %% [markdown]
# ## Default settings

# %%
schemes = {name: Scheme(name, rng_seed=0) for name in ("ova", "meta", "prunedsets")}
models = {}
for name, scheme in schemes.items():
    models[name] = scheme.fit(train)
    print(f"{name:10s} {score(scheme.predict(models[name], test))}")

# %% [markdown]
# ## What pruning does to the label sets
#
# Here every combination is common, so the default p = 3 keeps them all.
# Raising p to 25 shows the mechanism: rarer combinations are dropped, and
# their documents come back under the largest accepted subsets of at least
# b labels.

# %%
labelsets = [d.labels for d in train]
pruned = prune_label_sets(labelsets, p=25, b=1)
print(len(set(labelsets)), "distinct label sets in training,", len(pruned.accepted), "accepted")
for i, s in pruned.instances:
    if s != labelsets[i]:
        print("  e.g.", sorted(labelsets[i]), "->",
              [sorted(a) for j, a in pruned.instances if j == i])
        break
print(len(pruned.instances), "training instances after reinstatement")

# %% [markdown]
# ## Tuning on the development split
#
# The one-vs-all threshold and the share of n-gram features kept (ranked by
# information gain) are chosen by exhaustive search on dev micro-F.

# %%
grid = [{"percent": pc, "theta": th} for pc in (25, 50, 100) for th in (-0.4, -0.2, 0.0, 0.2)]
best, rows = tune(grid, train, dev, schemes["ova"])
for params, _, _, f in rows:
    print(f"  percent={params['percent']:3d} theta={params['theta']:+.1f}  F={100 * f:5.1f}")
print("best", best)
tuned = schemes["ova"].fit(train, best)
print(f"tuned ova  {score(schemes['ova'].predict(tuned, test, best))}")

# %% [markdown]
# ## Cross-validation with a fixed base set
#
# Each fold of the evaluation pool is predicted by a model trained on the
# other folds plus the whole base set, so every pool document is predicted
# exactly once.

# %%
cv_preds = cross_validate_predictions(train, dev + test, k=5, scheme=schemes["meta"])
p, r, f = micro_prf(count(cv_preds, {d.id: d.labels for d in dev + test}, cats))
print(f"5-fold meta over {len(cv_preds)} documents: F={100 * f:.1f}")

# %% [markdown]
# ## Saving and loading
#
# Models are stored as JSON and predict identically after a round trip.

# %%
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "prunedsets.json"
    save_model(models["prunedsets"], path)
    again = load_model(path)
    same = schemes["prunedsets"].predict(again, test) == \
        schemes["prunedsets"].predict(models["prunedsets"], test)
    print("round trip identical:", same)

# %% [markdown]
# A bootstrapped lexicon can also feed the classifier: each entry becomes one
# extra feature counting its occurrences.

# %%
lexicon = bootstrap_modified(synthetic_seeds(4), build_index(train, kinds=("phrase",)),
                             iterations=3, thresholds=Thresholds(3, 5000, 10, 100))
with_lex = Scheme("ova", include=("unigram", "bigram", "lexicon"), lexicon=lexicon)
print(f"ova+lexicon {score(with_lex.predict(with_lex.fit(train), test))}")
