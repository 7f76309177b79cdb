"""Growing a category lexicon from a handful of seed words.

Run with ``python3 demos/bootstrap_walkthrough.py``.  Everything happens on a
synthetic corpus, so the numbers are only illustrative.
"""

# %% [markdown]
# # Bootstrapping a lexicon
#
# We start from three seed words per category and a corpus of short incident
# narratives.  Each narrative mentions words of its categories inside
# category-specific phrasings ("visibility was reduced by ...", "the crew
# suffered from ...").  The bootstrapper learns which contexts are reliable
# for a category and harvests the other words those contexts extract.

# %%
from lexboot.bootstrap import Thresholds, bootstrap_modified, bootstrap_original, semprob
from lexboot.labeler import label_corpus
from lexboot.patterns import Target, build_index
from lexboot.synthetic import CATEGORY_WORDS, synthetic_corpus, synthetic_seeds

docs = synthetic_corpus(400, n_categories=3, seed=7)
seeds = synthetic_seeds(3, per_category=3)
print(docs[0].raw_text)
print(seeds.entries)

# %% [markdown]
# ## The co-occurrence index
#
# Every noun phrase is extracted together with its two-token left and right
# contexts.  The index records how often each context extracted each phrase.

# %%
index = build_index(docs, kinds=("phrase",))
print(len(index.pattern_targets), "patterns")
top = sorted(index.pattern_targets, key=index.pattern_freq, reverse=True)[:5]
for p in top:
    print(f"{index.pattern_freq(p):5d}  {p}")

# %% [markdown]
# ## Two loops
#
# The original loop scores candidates by how many seed-extracting patterns
# extract them (AvgLog), relative to the best other category.  The modified
# loop uses a probability: how likely a pattern's extractions belong to the
# category, weighted by how often the candidate is seen with that pattern.
# It also drops rare candidates and noisy patterns.

# %%
original = bootstrap_original(seeds, index, iterations=4)
modified = bootstrap_modified(seeds, index, iterations=4, thresholds=Thresholds(3, 5000, 10, 100))


def precision(lexicon):
    learned = [(c, e.text) for c, items in lexicon.entries.items() for e in items
               if e.iteration_added > 0]
    right = sum(text in CATEGORY_WORDS[c] for c, text in learned)
    return right, len(learned)


for name, lex in [("original", original), ("modified", modified)]:
    right, total = precision(lex)
    print(f"{name:9s} learned {total:3d} entries, {right} in the intended category")
    for c, items in sorted(lex.entries.items()):
        print("   ", c, [e.text for e in items if e.iteration_added > 0][:8])

# %% [markdown]
# A single score can be inspected directly.  With the default denominator
# (the word's corpus frequency) a word seen with both a left and a right
# context is counted twice, so the scores can exceed 1.  Dividing by the
# number of extractions instead keeps their sum over categories at most 1.

# %%
word = Target(("frost",), "phrase")
for c in seeds.categories:
    by_freq = semprob(word, c, index, modified)
    by_ext = semprob(word, c, index, modified, denominator="extractions")
    print(f"SemProb(frost, {c}): {by_freq:.3f} by frequency, {by_ext:.3f} by extractions")

# %% [markdown]
# ## Labeling with the lexicon
#
# A document gets every category with an entry appearing in its text.

# %%
labels = {ls.document_id: ls.labels for ls in label_corpus(docs, modified)}
hits = sum(labels[d.id] == d.labels for d in docs)
print(f"{hits} of {len(docs)} documents labeled exactly right")
