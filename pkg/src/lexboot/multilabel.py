"""Multi-label schemes over pluggable linear learners.

* One-Versus-All: one binary model per category; a document gets every
  category whose decision value exceeds ``theta``.
* MetaLabeler: a multiclass model predicts the label count ``K``; the ``K``
  categories with the highest positive decisions are returned (never padded).
* Pruned Sets: frequent label combinations become pseudo-labels of a
  multiclass ensemble whose votes are recombined with threshold ``t``.

Feature selection by information gain happens per binary task (against the
binary label) and per multiclass task (against its class variable).
Lexicon-entry features are never removed.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

from .corpus import Document
from .evaluation import EvalCounts, count, micro_prf
from .features import (BIGRAM, UNIGRAM, FeatureSpace, build_feature_space,
                       select_features, vectorize_corpus)
from .learners import LinearModel, LinearSVM, MulticlassModel, MulticlassSVM

__all__ = [
    "OvaModel", "MetaModel", "PrunedSetsModel", "PrunedLabelSets",
    "ova_train", "ova_predict", "metalabeler_train", "metalabeler_predict",
    "prune_label_sets", "prunedsets_train", "prunedsets_predict", "combine_votes",
    "PERCENT_GRID", "THETA_GRID", "B_GRID", "P_GRID", "T_GRID",
    "grid_product", "ova_grid", "meta_grid", "prunedsets_grid",
    "Scheme", "tune", "write_tuning_report", "cross_validate_augmented",
    "cross_validate_predictions", "save_model", "load_model",
]

PERCENT_GRID = tuple(range(10, 101, 10))
THETA_GRID = tuple(round(-2.0 + 0.2 * i, 1) for i in range(21))
B_GRID = (2, 3, 5)
P_GRID = (3, 5, 10)
T_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))

VOTE_TOLERANCE = 1e-9


def _columns(space: FeatureSpace, labels: Sequence, percent: int,
             presence: sparse.spmatrix | None = None) -> np.ndarray:
    if percent == 100:
        return np.arange(len(space))
    return select_features(space, labels, percent, presence).columns


def _rows(space: FeatureSpace, x) -> sparse.csr_matrix:
    """Accept a document, a list of documents, a {index: weight} vector or a matrix."""
    if isinstance(x, Document):
        return vectorize_corpus([x], space)
    if isinstance(x, Mapping):
        cols = sorted(x)
        return sparse.csr_matrix((np.array([x[j] for j in cols], dtype=float),
                                  (np.zeros(len(cols), dtype=int), cols)), shape=(1, len(space)))
    if isinstance(x, (list, tuple)) and x and isinstance(x[0], Document):
        return vectorize_corpus(list(x), space)
    return sparse.csr_matrix(x)


def _binary_models(space, X, labelsets, categories, learner, percent, rng_seed):
    columns, models = {}, {}
    for k, cat in enumerate(categories):
        y = np.array([1 if cat in s else -1 for s in labelsets])
        cols = _columns(space, y, percent)
        columns[cat] = cols
        models[cat] = learner.train(X[:, cols], y, rng_seed=rng_seed + k)
    return columns, models


def _decisions(X, categories, columns, models) -> np.ndarray:
    out = np.zeros((X.shape[0], len(categories)))
    for k, cat in enumerate(categories):
        out[:, k] = models[cat].decision(X[:, columns[cat]])
    return out


def _labelsets(docs: Sequence[Document]) -> list[frozenset[str]]:
    out = []
    for d in docs:
        if d.labels is None:
            raise ValueError(f"training document {d.id!r} has no gold labels")
        out.append(frozenset(d.labels))
    return out


def _categories(labelsets, categories) -> list[str]:
    if categories is not None:
        return sorted(categories)
    return sorted({c for s in labelsets for c in s})


def _prepare_xy(docs, space, X):
    if X is None:
        X = vectorize_corpus(docs, space)
    return sparse.csr_matrix(X), _labelsets(docs)


# --- One-Versus-All ---------------------------------------------------------------------

@dataclass
class OvaModel:
    categories: list[str]
    space: FeatureSpace
    columns: dict[str, np.ndarray]
    models: dict[str, LinearModel]
    theta: float = 0.0

    def decisions(self, x) -> np.ndarray:
        return _decisions(_rows(self.space, x), self.categories, self.columns, self.models)


def ova_train(docs: Sequence[Document], space: FeatureSpace, learner=None, theta: float = 0.0,
              percent: int = 100, X=None, categories: Iterable[str] | None = None,
              rng_seed: int = 0) -> OvaModel:
    learner = learner or LinearSVM()
    X, labelsets = _prepare_xy(docs, space, X)
    cats = _categories(labelsets, categories)
    columns, models = _binary_models(space, X, labelsets, cats, learner, percent, rng_seed)
    return OvaModel(cats, space, columns, models, theta)


def threshold_decisions(decisions: np.ndarray, categories: Sequence[str],
                        theta: float) -> list[frozenset[str]]:
    decisions = np.atleast_2d(decisions)
    return [frozenset(c for c, v in zip(categories, row) if v > theta) for row in decisions]


def ova_predict(model: OvaModel, x, theta: float | None = None) -> list[frozenset[str]]:
    theta = model.theta if theta is None else theta
    return threshold_decisions(model.decisions(x), model.categories, theta)


# --- MetaLabeler ------------------------------------------------------------------------

@dataclass
class MetaModel:
    categories: list[str]
    space: FeatureSpace
    columns: dict[str, np.ndarray]
    models: dict[str, LinearModel]
    cardinality_columns: np.ndarray
    cardinality_model: MulticlassModel

    def decisions(self, x) -> np.ndarray:
        return _decisions(_rows(self.space, x), self.categories, self.columns, self.models)

    def cardinality(self, x) -> list[int]:
        X = _rows(self.space, x)
        return [int(k) for k in self.cardinality_model.predict(X[:, self.cardinality_columns])]


def metalabeler_train(docs: Sequence[Document], space: FeatureSpace, learner=None,
                      multiclass_learner=None, percent: int = 100, X=None,
                      categories: Iterable[str] | None = None, rng_seed: int = 0) -> MetaModel:
    learner = learner or LinearSVM()
    multiclass_learner = multiclass_learner or MulticlassSVM()
    X, labelsets = _prepare_xy(docs, space, X)
    cats = _categories(labelsets, categories)
    columns, models = _binary_models(space, X, labelsets, cats, learner, percent, rng_seed)
    sizes = [len(s) for s in labelsets]
    card_cols = _columns(space, sizes, percent)
    card = multiclass_learner.train(X[:, card_cols], sizes, rng_seed=rng_seed + len(cats))
    return MetaModel(cats, space, columns, models, card_cols, card)


def top_k_positive(decisions: Sequence[float], categories: Sequence[str], k: int) -> frozenset[str]:
    """The min(k, #positive) categories with the largest positive decisions."""
    positive = sorted((-v, c) for c, v in zip(categories, decisions) if v > 0)
    return frozenset(c for _, c in positive[:max(k, 0)])


def metalabeler_predict(model: MetaModel, x) -> list[frozenset[str]]:
    X = _rows(model.space, x)
    ks = model.cardinality(X)
    return [top_k_positive(row, model.categories, k) for row, k in zip(model.decisions(X), ks)]


# --- Pruned Sets ------------------------------------------------------------------------

@dataclass
class PrunedLabelSets:
    accepted: list[frozenset[str]]
    # (training instance index, accepted label set) after pruning and reinstatement
    instances: list[tuple[int, frozenset[str]]]


def _set_key(s: frozenset[str]) -> tuple:
    return (len(s), tuple(sorted(s)))


def prune_label_sets(labelsets: Sequence[Iterable[str]], p: int, b: int) -> PrunedLabelSets:
    """Accept label sets seen at least `p` times and reinstate pruned instances.

    Label sets of rejected instances are broken into proper subsets of size
    at least `b`.  A subset is accepted when at least `p` training instances
    have a label set containing it.  Each rejected instance comes back once
    per maximal accepted proper subset (of size >= b) of its label set.
    """
    if p < 1 or b < 1:
        raise ValueError("p and b must be >= 1")
    sets = [frozenset(s) for s in labelsets]
    exact = Counter(sets)
    accepted = {s for s, c in exact.items() if c >= p}
    rejected = sorted((s for s in exact if s not in accepted), key=_set_key)
    candidates = set()
    for s in rejected:
        items = sorted(s)
        for size in range(b, len(items)):
            candidates.update(frozenset(c) for c in itertools.combinations(items, size))
    for cand in sorted(candidates - accepted, key=_set_key):
        if sum(c for s, c in exact.items() if cand <= s) >= p:
            accepted.add(cand)
    if not accepted:
        raise ValueError("no accepted label sets")
    ordered = sorted(accepted, key=_set_key)
    instances = []
    for i, s in enumerate(sets):
        if s in accepted:
            instances.append((i, s))
            continue
        inside = [a for a in ordered if a < s and len(a) >= b]
        for a in inside:
            if not any(a < other for other in inside):
                instances.append((i, a))
    return PrunedLabelSets(ordered, instances)


@dataclass
class PrunedSetsModel:
    categories: list[str]
    space: FeatureSpace
    label_sets: list[frozenset[str]]  # pseudo-label id -> label set
    columns: np.ndarray
    models: list[MulticlassModel]
    p: int
    b: int
    sample_fraction: float = 0.63
    t: float = 0.5

    @property
    def M(self) -> int:
        return len(self.models)

    def member_predictions(self, x) -> list[list[frozenset[str]]]:
        """Per row, the label set voted by each ensemble member."""
        X = _rows(self.space, x)[:, self.columns]
        per_model = [m.predict(X) for m in self.models]
        return [[self.label_sets[ids[r]] for ids in per_model] for r in range(X.shape[0])]


def prunedsets_train(docs: Sequence[Document], space: FeatureSpace, learner=None,
                     p: int = 3, b: int = 2, M: int = 10, sample_fraction: float = 0.63,
                     rng_seed: int = 0, percent: int = 100, X=None, t: float = 0.5,
                     categories: Iterable[str] | None = None) -> PrunedSetsModel:
    if M < 1:
        raise ValueError("M must be >= 1")
    if not 0 < sample_fraction <= 1:
        raise ValueError("sample_fraction must be in (0, 1]")
    learner = learner or MulticlassSVM()
    X, labelsets = _prepare_xy(docs, space, X)
    cats = _categories(labelsets, categories)
    pruned = prune_label_sets(labelsets, p, b)
    pseudo = {s: k for k, s in enumerate(pruned.accepted)}
    rows = np.array([i for i, _ in pruned.instances], dtype=np.int64)
    y = np.array([pseudo[s] for _, s in pruned.instances], dtype=np.int64)
    cols = np.arange(len(space))
    if percent != 100:
        presence = sparse.csr_matrix(space.presence)[rows]
        cols = select_features(space, y, percent, presence).columns
    Xe = X[rows][:, cols]
    n_sample = max(1, int(round(sample_fraction * len(rows))))
    rng = np.random.default_rng(rng_seed)
    models = []
    for j in range(M):
        pick = np.sort(rng.choice(len(rows), n_sample, replace=False))
        models.append(learner.train(Xe[pick], y[pick].tolist(), rng_seed=rng_seed + j))
    return PrunedSetsModel(cats, space, pruned.accepted, cols, models, p, b, sample_fraction, t)


def combine_votes(votes: Sequence[Iterable[str]], t: float) -> frozenset[str]:
    """Categories voted for by at least a fraction `t` of the members."""
    if not 0 < t <= 1:
        raise ValueError("t must be in (0, 1]")
    if not votes:
        return frozenset()
    tally = Counter(c for v in votes for c in set(v))
    return frozenset(c for c, n in tally.items() if n / len(votes) >= t - VOTE_TOLERANCE)


def prunedsets_predict(model: PrunedSetsModel, x, t: float | None = None) -> list[frozenset[str]]:
    t = model.t if t is None else t
    return [combine_votes(v, t) for v in model.member_predictions(x)]


# --- schemes, tuning and cross-validation -----------------------------------------------

def grid_product(**axes: Sequence) -> list[dict[str, Any]]:
    """Every combination of the axes, the first axis varying slowest."""
    names = list(axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*axes.values())]


def ova_grid() -> list[dict[str, Any]]:
    return grid_product(percent=PERCENT_GRID, theta=THETA_GRID)


def meta_grid() -> list[dict[str, Any]]:
    return grid_product(percent=PERCENT_GRID)


def prunedsets_grid() -> list[dict[str, Any]]:
    return grid_product(b=B_GRID, p=P_GRID, percent=PERCENT_GRID, t=T_GRID)


DEFAULT_PARAMS = {
    "ova": {"percent": 100, "theta": 0.0},
    "meta": {"percent": 100},
    "prunedsets": {"percent": 100, "p": 3, "b": 2, "t": 0.5},
}
_TRAIN_KEYS = {"ova": ("percent",), "meta": ("percent",), "prunedsets": ("percent", "p", "b")}


@dataclass
class Prepared:
    """Training documents with their feature space and TF-IDF matrix."""

    docs: list[Document]
    space: FeatureSpace
    X: sparse.csr_matrix


@dataclass
class Scheme:
    """Feature extraction plus one multi-label scheme, trainable on documents."""

    name: str = "ova"
    learner: Any = field(default_factory=LinearSVM)
    multiclass_learner: Any = field(default_factory=MulticlassSVM)
    stopwords: frozenset[str] = frozenset()
    include: tuple[str, ...] = (UNIGRAM, BIGRAM)
    lexicon: Any = None
    categories: tuple[str, ...] | None = None
    M: int = 10
    sample_fraction: float = 0.63
    rng_seed: int = 0

    def __post_init__(self):
        if self.name not in DEFAULT_PARAMS:
            raise ValueError(f"unknown scheme {self.name!r}")

    def params(self, overrides: Mapping[str, Any] | None = None) -> dict[str, Any]:
        out = dict(DEFAULT_PARAMS[self.name])
        for k, v in (overrides or {}).items():
            if k not in out:
                raise ValueError(f"parameter {k!r} does not apply to scheme {self.name!r}")
            out[k] = v
        return out

    def train_key(self, params: Mapping[str, Any]) -> tuple:
        return tuple(params[k] for k in _TRAIN_KEYS[self.name])

    def prepare(self, docs: Sequence[Document]) -> Prepared:
        docs = sorted(docs, key=lambda d: d.id)
        space = build_feature_space(docs, self.stopwords, self.include, self.lexicon)
        return Prepared(docs, space, vectorize_corpus(docs, space))

    def fit(self, train: Sequence[Document] | Prepared, params: Mapping[str, Any] | None = None):
        prep = train if isinstance(train, Prepared) else self.prepare(train)
        prm = self.params(params)
        common = dict(X=prep.X, categories=self.categories, rng_seed=self.rng_seed,
                      percent=prm["percent"])
        if self.name == "ova":
            return ova_train(prep.docs, prep.space, self.learner, theta=prm["theta"], **common)
        if self.name == "meta":
            return metalabeler_train(prep.docs, prep.space, self.learner,
                                     self.multiclass_learner, **common)
        return prunedsets_train(prep.docs, prep.space, self.multiclass_learner, p=prm["p"],
                                b=prm["b"], M=self.M, sample_fraction=self.sample_fraction,
                                t=prm["t"], **common)

    def predict(self, model, docs: Sequence[Document], params: Mapping[str, Any] | None = None,
                X=None) -> dict[str, frozenset[str]]:
        X = vectorize_corpus(list(docs), model.space) if X is None else X
        prm = self.params(params) if params is not None else None
        if isinstance(model, OvaModel):
            labels = ova_predict(model, X, None if prm is None else prm["theta"])
        elif isinstance(model, MetaModel):
            labels = metalabeler_predict(model, X)
        else:
            labels = prunedsets_predict(model, X, None if prm is None else prm["t"])
        return {d.id: s for d, s in zip(docs, labels)}


def _gold(docs: Sequence[Document]) -> dict[str, frozenset[str]]:
    return {d.id: frozenset(d.labels or ()) for d in docs}


def tune(grid: Sequence[Mapping[str, Any]], train: Sequence[Document], dev: Sequence[Document],
         scheme: Scheme, categories: Sequence[str] | None = None):
    """Exhaustive grid search on micro-F over `dev`.

    Returns ``(best_params, rows)`` where rows hold ``(params, P, R, F)`` for
    every grid point in order.  Ties keep the earliest grid point.
    """
    if not grid:
        raise ValueError("empty parameter grid")
    prep = scheme.prepare(train)
    dev = sorted(dev, key=lambda d: d.id)
    X_dev = vectorize_corpus(dev, prep.space)
    gold = _gold(dev)
    if categories is None:
        categories = scheme.categories or sorted({c for d in list(train) + dev
                                                  for c in (d.labels or ())})
    models: dict[tuple, Any] = {}
    rows = []
    best, best_f = None, -1.0
    for point in grid:
        params = scheme.params(point)
        key = scheme.train_key(params)
        if key not in models:
            models[key] = scheme.fit(prep, params)
        preds = scheme.predict(models[key], dev, params, X=X_dev)
        p, r, f = micro_prf(count(preds, gold, categories))
        rows.append((params, p, r, f))
        if f > best_f:
            best, best_f = params, f
    return best, rows


def write_tuning_report(rows, path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        names = list(rows[0][0]) if rows else []
        fh.write("\t".join(names + ["P", "R", "F"]) + "\n")
        for params, p, r, f in rows:
            vals = [str(params[n]) for n in names]
            fh.write("\t".join(vals + [f"{100 * p:.2f}", f"{100 * r:.2f}", f"{100 * f:.2f}"]) + "\n")


def cross_validate_predictions(base_train: Sequence[Document], eval_pool: Sequence[Document],
                               k: int = 5, scheme: Scheme | None = None,
                               params: Mapping[str, Any] | None = None,
                               rng_seed: int = 0) -> dict[str, frozenset[str]]:
    """Predictions for every pool document from the fold that held it out."""
    if k < 2:
        raise ValueError("k must be >= 2")
    pool = sorted(eval_pool, key=lambda d: d.id)
    if len(pool) < k:
        raise ValueError("evaluation pool smaller than the number of folds")
    scheme = scheme or Scheme()
    order = np.random.default_rng(rng_seed).permutation(len(pool))
    folds = np.array_split(order, k)
    preds: dict[str, frozenset[str]] = {}
    for i, fold in enumerate(folds):
        held = set(fold.tolist())
        train = list(base_train) + [pool[j] for j in range(len(pool)) if j not in held]
        test = [pool[j] for j in sorted(held)]
        model = scheme.fit(train, params)
        preds.update(scheme.predict(model, test, params))
    return preds


def cross_validate_augmented(base_train: Sequence[Document], eval_pool: Sequence[Document],
                             k: int = 5, scheme: Scheme | None = None,
                             params: Mapping[str, Any] | None = None, rng_seed: int = 0,
                             categories: Sequence[str] | None = None) -> EvalCounts:
    """k-fold evaluation over `eval_pool`, each fold trained with `base_train` added.

    Counts are pooled over all folds before any score is computed.
    """
    preds = cross_validate_predictions(base_train, eval_pool, k, scheme, params, rng_seed)
    gold = _gold(eval_pool)
    if categories is None:
        categories = (scheme.categories if scheme and scheme.categories else
                      sorted({c for d in list(base_train) + list(eval_pool)
                              for c in (d.labels or ())}))
    return count(preds, gold, categories)


# --- persistence --------------------------------------------------------------------------

MODEL_FORMAT = "lexboot-model"
MODEL_VERSION = 1


def _space_record(space: FeatureSpace) -> dict:
    return {"features": [list(f) for f in space.features],
            "df": space.document_frequency.tolist(), "corpus_size": space.corpus_size,
            "stopwords": sorted(space.stopwords)}


def _space_from(rec: dict) -> FeatureSpace:
    return FeatureSpace([tuple(f) for f in rec["features"]], rec["df"], rec["corpus_size"],
                        frozenset(rec["stopwords"]))


def _linear_record(model: LinearModel) -> dict:
    return {"weights": model.weights.tolist(), "bias": model.bias}


def _linear_from(rec: dict) -> LinearModel:
    return LinearModel(np.array(rec["weights"], dtype=float), float(rec["bias"]))


def _multiclass_record(model: MulticlassModel) -> dict:
    return {"classes": list(model.classes), "weights": model.weights.tolist(),
            "bias": model.bias.tolist()}


def _multiclass_from(rec: dict) -> MulticlassModel:
    w = np.array(rec["weights"], dtype=float).reshape(len(rec["classes"]), -1)
    return MulticlassModel(list(rec["classes"]), w, np.array(rec["bias"], dtype=float))


def _binary_block(model) -> dict:
    return {c: {"columns": model.columns[c].tolist(), **_linear_record(model.models[c])}
            for c in model.categories}


def _binary_from(rec: dict):
    cols = {c: np.array(v["columns"], dtype=np.int64) for c, v in rec.items()}
    models = {c: _linear_from(v) for c, v in rec.items()}
    return cols, models


def save_model(model, path, header: str | None = None) -> None:
    rec: dict[str, Any] = {"format": MODEL_FORMAT, "format_version": MODEL_VERSION}
    if header:
        rec["header"] = header
    rec["categories"] = model.categories
    rec["space"] = _space_record(model.space)
    if isinstance(model, OvaModel):
        rec.update(scheme="ova", theta=model.theta, binary=_binary_block(model))
    elif isinstance(model, MetaModel):
        rec.update(scheme="meta", binary=_binary_block(model),
                   cardinality_columns=model.cardinality_columns.tolist(),
                   cardinality=_multiclass_record(model.cardinality_model))
    elif isinstance(model, PrunedSetsModel):
        rec.update(scheme="prunedsets", p=model.p, b=model.b, t=model.t,
                   sample_fraction=model.sample_fraction,
                   label_sets=[sorted(s) for s in model.label_sets],
                   columns=model.columns.tolist(),
                   members=[_multiclass_record(m) for m in model.models])
    else:
        raise TypeError(f"cannot save {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rec, fh, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        rec = json.load(fh)
    if rec.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a model file")
    if rec.get("format_version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {rec.get('format_version')!r}")
    cats = list(rec["categories"])
    space = _space_from(rec["space"])
    scheme = rec.get("scheme")
    if scheme == "ova":
        cols, models = _binary_from(rec["binary"])
        return OvaModel(cats, space, cols, models, float(rec["theta"]))
    if scheme == "meta":
        cols, models = _binary_from(rec["binary"])
        return MetaModel(cats, space, cols, models,
                         np.array(rec["cardinality_columns"], dtype=np.int64),
                         _multiclass_from(rec["cardinality"]))
    if scheme == "prunedsets":
        return PrunedSetsModel(cats, space, [frozenset(s) for s in rec["label_sets"]],
                               np.array(rec["columns"], dtype=np.int64),
                               [_multiclass_from(m) for m in rec["members"]],
                               rec["p"], rec["b"], rec["sample_fraction"], rec["t"])
    raise ValueError(f"{path}: unknown scheme {scheme!r}")
