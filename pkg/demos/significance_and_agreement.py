"""Is one system really better, and how much do two annotators agree?

Run with ``python3 demos/significance_and_agreement.py``.
"""

# %% [markdown]
# # Comparing systems
#
# Two systems label the same noisy synthetic test split.  The first simply
# applies a bootstrapped lexicon; the second is a one-vs-all SVM trained on
# n-grams.  Two paired tests ask whether their micro-F gap is more than
# noise.

# %%
import random

from lexboot.agreement import krippendorff_alpha, masi_distance
from lexboot.bootstrap import Thresholds, bootstrap_modified
from lexboot.evaluation import approx_randomization, correctness, count, mcnemar, micro_prf
from lexboot.labeler import label_corpus
from lexboot.multilabel import Scheme
from lexboot.patterns import build_index
from lexboot.synthetic import split_ids, synthetic_corpus, synthetic_seeds

docs = synthetic_corpus(500, n_categories=4, seed=5, noise=0.45)
train, test = split_ids(docs, [0.5, 0.5], seed=1)
cats = sorted({c for d in docs for c in d.labels})
gold = {d.id: d.labels for d in test}

lexicon = bootstrap_modified(synthetic_seeds(4), build_index(train, kinds=("phrase",)),
                             iterations=3, thresholds=Thresholds(3, 5000, 10, 100))
preds_a = {ls.document_id: ls.labels for ls in label_corpus(test, lexicon)}
svm = Scheme("ova")
preds_b = svm.predict(svm.fit(train), test)
for name, preds in [("lexicon", preds_a), ("svm", preds_b)]:
    print(f"{name:8s} F={100 * micro_prf(count(preds, gold, cats))[2]:.2f}")

# %% [markdown]
# McNemar looks at the individual (document, category) decisions and counts
# those only one system got right.  Approximate randomization instead swaps
# the two systems' outputs document by document and asks how often the
# shuffled F gap is at least the observed one.

# %%
right_a = correctness(preds_a, gold, cats)
right_b = correctness(preds_b, gold, cats)
stat, p = mcnemar(right_a, right_b)
print(f"only lexicon right: {int((right_a & ~right_b).sum())}, "
      f"only svm right: {int((~right_a & right_b).sum())}")
print(f"McNemar chi2={stat:.3f} p={p:.2g}")
# with 9999 shuffles the smallest reachable p-value is 1/10000
print(f"randomization p={approx_randomization(preds_a, preds_b, gold, shuffles=9999):.4f}")
print("a system against itself:", approx_randomization(preds_a, preds_a, gold, shuffles=999))

# %% [markdown]
# # Annotator agreement
#
# Set-valued labels need a graded distance.  MASI combines the Jaccard overlap
# with a penalty that depends on whether one set contains the other.

# %%
for a, b in [({"x"}, {"x"}), ({"x"}, {"x", "y"}), ({"x", "y"}, {"y", "z"}), ({"x"}, {"y"})]:
    print(f"MASI({sorted(a)}, {sorted(b)}) = {masi_distance(a, b):.3f}")

# %% [markdown]
# Krippendorff's alpha compares the observed disagreement with what pairing
# labels at random would give.  A simulated second annotator copies the gold
# labels and, with some probability, drops or adds one category.

# %%
rng = random.Random(0)


def second_annotator(labels, slip):
    out = set(labels)
    if rng.random() < slip:
        if out and rng.random() < 0.5:
            out.discard(rng.choice(sorted(out)))
        else:
            out.add(rng.choice(cats))
    return out


for slip in (0.0, 0.1, 0.3, 0.6):
    pairs = [(d.labels, second_annotator(d.labels, slip)) for d in test]
    print(f"slip {slip:.1f}: alpha = {krippendorff_alpha(pairs):.3f}")
