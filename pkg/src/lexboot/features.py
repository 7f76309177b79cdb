"""N-gram and lexicon-entry features, TF-IDF weighting, information-gain selection.

Unigrams and bigrams come from lowercased, stopword-filtered tokens
(bigrams join adjacent surviving tokens of a sentence).  Lexicon entries are
single features counted as contiguous token-sequence matches.  Weights are
``tf * ln(N / df)`` with document frequencies from the training corpus.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .corpus import Document
from .labeler import PhraseMatcher

__all__ = [
    "FeatureSpace", "build_feature_space", "term_counts", "term_count_matrix",
    "vectorize", "vectorize_corpus", "tfidf", "information_gain", "information_gains",
    "select_features", "save_feature_space", "UNIGRAM", "BIGRAM", "LEXICON",
]

UNIGRAM, BIGRAM, LEXICON = "unigram", "bigram", "lexicon"
_KINDS = (UNIGRAM, BIGRAM, LEXICON)

Feature = tuple[str, str]  # (kind, text)


@dataclass
class FeatureSpace:
    features: list[Feature]
    document_frequency: np.ndarray
    corpus_size: int
    stopwords: frozenset[str] = frozenset()
    # training documents x features, True where the feature occurs
    presence: sparse.csr_matrix | None = None
    # positions of these features in the space they were selected from
    columns: np.ndarray | None = None
    index: dict[Feature, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.document_frequency = np.asarray(self.document_frequency, dtype=np.int64)
        self.index = {f: i for i, f in enumerate(self.features)}
        if len(self.index) != len(self.features):
            raise ValueError("duplicate feature identifiers")
        if self.columns is None:
            self.columns = np.arange(len(self.features))

    def __len__(self):
        return len(self.features)

    @property
    def idf(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.corpus_size / self.document_frequency)

    @property
    def lexicon_entries(self) -> list[str]:
        return [text for kind, text in self.features if kind == LEXICON]


def _ngram_tokens(doc: Document, stopwords: frozenset[str]) -> Iterable[list[str]]:
    for sent in doc.sentences:
        yield [w for w in (t.surface.lower() for t in sent.tokens)
               if w not in stopwords and any(ch.isalnum() for ch in w)]


def term_counts(doc: Document, kinds: Sequence[str], stopwords: frozenset[str] = frozenset(),
                matcher: PhraseMatcher | None = None) -> Counter:
    """Raw term frequencies of every candidate feature in `doc`."""
    counts: Counter = Counter()
    if UNIGRAM in kinds or BIGRAM in kinds:
        for words in _ngram_tokens(doc, stopwords):
            if UNIGRAM in kinds:
                counts.update((UNIGRAM, w) for w in words)
            if BIGRAM in kinds:
                counts.update((BIGRAM, f"{a} {b}") for a, b in zip(words, words[1:]))
    if LEXICON in kinds and matcher is not None:
        for sent in doc.sentences:
            toks = [t.surface.lower() for t in sent.tokens]
            counts.update((LEXICON, " ".join(form)) for _, form, _ in matcher.matches(toks))
    return counts


def build_feature_space(corpus: Sequence[Document], stopwords: Iterable[str] = (),
                        include: Sequence[str] = (UNIGRAM,), lexicon=None) -> FeatureSpace:
    """Collect features and document frequencies from the training corpus.

    Lexicon entries that never occur in the training corpus are left out,
    since their IDF is undefined.
    """
    include = tuple(include)
    bad = set(include) - set(_KINDS)
    if bad:
        raise ValueError(f"unknown feature kinds {sorted(bad)}")
    if (LEXICON in include) != (lexicon is not None):
        raise ValueError("a lexicon is required exactly when lexicon features are enabled")
    stop = frozenset(w.lower() for w in stopwords)
    matcher = PhraseMatcher(lexicon) if lexicon is not None else None
    per_doc = [term_counts(d, include, stop, matcher) for d in corpus]
    df: Counter = Counter()
    for counts in per_doc:
        df.update(counts.keys())
    order = {k: i for i, k in enumerate(_KINDS)}
    features = sorted(df, key=lambda f: (order[f[0]], f[1]))
    index = {f: i for i, f in enumerate(features)}
    rows, cols = [], []
    for r, counts in enumerate(per_doc):
        for f in counts:
            rows.append(r)
            cols.append(index[f])
    presence = sparse.csr_matrix((np.ones(len(rows), dtype=bool), (rows, cols)),
                                 shape=(len(per_doc), len(features)))
    return FeatureSpace(features, [df[f] for f in features], len(per_doc), stop, presence)


def _matcher_for(space: FeatureSpace) -> PhraseMatcher | None:
    entries = space.lexicon_entries
    return PhraseMatcher({LEXICON: entries}) if entries else None


def term_count_matrix(docs: Sequence[Document], space: FeatureSpace) -> sparse.csr_matrix:
    """Documents x features matrix of raw term frequencies (in-space features only)."""
    kinds = {k for k, _ in space.features}
    matcher = _matcher_for(space)
    rows, cols, vals = [], [], []
    for r, doc in enumerate(docs):
        for f, c in term_counts(doc, tuple(kinds), space.stopwords, matcher).items():
            j = space.index.get(f)
            if j is not None:
                rows.append(r)
                cols.append(j)
                vals.append(c)
    return sparse.csr_matrix((np.asarray(vals, dtype=float), (rows, cols)),
                             shape=(len(docs), len(space)))


def tfidf(tf: sparse.spmatrix, space: FeatureSpace) -> sparse.csr_matrix:
    return sparse.csr_matrix(tf @ sparse.diags(space.idf))


def vectorize_corpus(docs: Sequence[Document], space: FeatureSpace) -> sparse.csr_matrix:
    return tfidf(term_count_matrix(docs, space), space)


def vectorize(doc: Document, space: FeatureSpace) -> dict[int, float]:
    """Sparse TF-IDF vector of one document as {feature index: weight}."""
    row = vectorize_corpus([doc], space).getrow(0)
    return {int(j): float(v) for j, v in sorted(zip(row.indices, row.data))}


# --- information gain ---------------------------------------------------------------------

def _entropy(counts: np.ndarray) -> np.ndarray:
    """Entropy in bits along axis 0 of a count array, with 0 log 0 = 0."""
    total = counts.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        prob = np.where(total > 0, counts / np.where(total > 0, total, 1), 0.0)
        terms = np.where(prob > 0, -prob * np.log2(np.where(prob > 0, prob, 1)), 0.0)
    return terms.sum(axis=0)


def information_gains(presence: sparse.spmatrix, labels: Sequence) -> np.ndarray:
    """IG of every column of a boolean presence matrix w.r.t. discrete labels."""
    labels = np.asarray(labels)
    m = presence.shape[0]
    if m == 0:
        raise ValueError("information gain needs at least one document")
    if len(labels) != m:
        raise ValueError("labels and presence rows differ in number")
    pres = sparse.csr_matrix(presence, dtype=float)
    classes = np.unique(labels)
    with_f = np.vstack([np.asarray(pres[labels == c].sum(axis=0)).ravel() for c in classes])
    class_totals = np.array([np.sum(labels == c) for c in classes], dtype=float)
    without_f = class_totals[:, None] - with_f
    n_with = with_f.sum(axis=0)
    h_class = float(_entropy(class_totals[:, None])[0])
    h_cond = (n_with * _entropy(with_f) + (m - n_with) * _entropy(without_f)) / m
    return np.maximum(h_class - h_cond, 0.0)


def information_gain(present: Sequence[bool], labels: Sequence) -> float:
    col = sparse.csr_matrix(np.asarray(present, dtype=bool).reshape(-1, 1))
    return float(information_gains(col, labels)[0])


def select_features(space: FeatureSpace, labels: Sequence, percent: int,
                    presence: sparse.spmatrix | None = None) -> FeatureSpace:
    """Keep the top `percent`% of n-gram features by IG plus every lexicon feature.

    Unigrams and bigrams are ranked together; ties go to the smaller feature
    text.  The kept count is rounded up.  `presence` defaults to the
    training presence matrix stored in the space.
    """
    if not 0 < percent <= 100:
        raise ValueError("percent must be in (0, 100]")
    presence = space.presence if presence is None else presence
    if presence is None:
        raise ValueError("no presence matrix to compute information gain from")
    ngram = [j for j, (kind, _) in enumerate(space.features) if kind != LEXICON]
    lexical = [j for j, (kind, _) in enumerate(space.features) if kind == LEXICON]
    if percent == 100:
        keep_ngram = ngram
    else:
        gains = information_gains(sparse.csc_matrix(presence)[:, ngram], labels) if ngram else []
        ranked = sorted(range(len(ngram)),
                        key=lambda k: (-gains[k], space.features[ngram[k]][1],
                                       space.features[ngram[k]][0]))
        n_keep = math.ceil(percent * len(ngram) / 100)
        keep_ngram = [ngram[k] for k in ranked[:n_keep]]
    cols = np.array(sorted(keep_ngram + lexical), dtype=np.int64)
    sub_presence = None
    if space.presence is not None:
        sub_presence = sparse.csr_matrix(sparse.csc_matrix(space.presence)[:, cols])
    return FeatureSpace([space.features[j] for j in cols], space.document_frequency[cols],
                        space.corpus_size, space.stopwords, sub_presence, cols)


def save_feature_space(space: FeatureSpace, path, labels: Sequence | None = None,
                       header: str | None = None) -> None:
    gains = (information_gains(space.presence, labels)
             if labels is not None and space.presence is not None else None)
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write("feature\tkind\tdf\tig\n")
        for j, (kind, text) in enumerate(space.features):
            ig = "" if gains is None else f"{gains[j]:.6f}"
            fh.write(f"{text}\t{kind}\t{space.document_frequency[j]}\t{ig}\n")
