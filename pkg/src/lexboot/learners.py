"""Reference linear learners trained by stochastic subgradient descent.

The binary learner minimizes ``½|w|² + C Σ max(0, 1 - y(w·x - b))`` in its
Pegasos form, ``λ/2 |w|² + mean hinge`` with ``λ = 1/(C m)``.  The bias is
not regularized.  The multiclass learner is the Crammer-Singer analogue.
Both are deterministic given the seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

__all__ = ["LinearModel", "LinearSVM", "MulticlassModel", "MulticlassSVM",
           "train_linear_reference", "train_multiclass_reference"]


def _as_csr(X) -> sparse.csr_matrix:
    X = sparse.csr_matrix(X, dtype=float)
    X.sum_duplicates()
    return X


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float = 0.0

    def decision(self, X) -> np.ndarray:
        """w·x - b for each row of X (or a single dense vector)."""
        if sparse.issparse(X):
            return np.asarray(X @ self.weights).ravel() - self.bias
        X = np.asarray(X, dtype=float)
        return X @ self.weights - self.bias

    def __eq__(self, other):
        return (isinstance(other, LinearModel) and self.bias == other.bias
                and np.array_equal(self.weights, other.weights))


def train_linear_reference(X, y: Sequence[int], C: float = 1.0, epochs: int = 20,
                           rng_seed: int = 0) -> LinearModel:
    X = _as_csr(X)
    y = np.asarray(y, dtype=float)
    m, d = X.shape
    if m == 0:
        raise ValueError("empty training set")
    if len(y) != m:
        raise ValueError("labels and rows differ in number")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    if C <= 0:
        raise ValueError("C must be positive")
    lam = 1.0 / (C * m)
    rng = np.random.default_rng(rng_seed)
    v = np.zeros(d)  # w = scale * v
    scale, bias = 1.0, 0.0
    indptr, indices, data = X.indptr, X.indices, X.data
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(m):
            t += 1
            eta = 1.0 / (lam * t + 1.0)
            lo, hi = indptr[i], indptr[i + 1]
            idx, val = indices[lo:hi], data[lo:hi]
            margin = y[i] * (scale * (v[idx] @ val) - bias)
            scale *= 1.0 - eta * lam
            if margin < 1.0:
                v[idx] += (eta * y[i] / scale) * val
                bias -= eta * y[i]
            if scale < 1e-9:
                v *= scale
                scale = 1.0
    return LinearModel(v * scale, float(bias))


@dataclass
class LinearSVM:
    """BinaryLearner: ``train(X, y)`` returns a LinearModel."""

    C: float = 1.0
    epochs: int = 20
    rng_seed: int = 0

    def train(self, X, y, rng_seed: int | None = None) -> LinearModel:
        seed = self.rng_seed if rng_seed is None else rng_seed
        return train_linear_reference(X, y, self.C, self.epochs, seed)


@dataclass
class MulticlassModel:
    classes: list
    weights: np.ndarray  # classes x features
    bias: np.ndarray

    def scores(self, X) -> np.ndarray:
        if sparse.issparse(X):
            s = np.asarray(X @ self.weights.T)
        else:
            s = np.atleast_2d(np.asarray(X, dtype=float)) @ self.weights.T
        return s - self.bias

    def predict(self, X) -> list:
        # argmax takes the first maximum, so ties go to the earlier class
        return [self.classes[k] for k in np.argmax(self.scores(X), axis=1)]

    def __eq__(self, other):
        return (isinstance(other, MulticlassModel) and self.classes == other.classes
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.bias, other.bias))


def train_multiclass_reference(X, y: Sequence, C: float = 1.0, epochs: int = 20,
                               rng_seed: int = 0) -> MulticlassModel:
    X = _as_csr(X)
    m, d = X.shape
    if m == 0:
        raise ValueError("empty training set")
    if len(y) != m:
        raise ValueError("labels and rows differ in number")
    classes = sorted(set(y))
    pos = {c: k for k, c in enumerate(classes)}
    yk = np.array([pos[c] for c in y])
    K = len(classes)
    V = np.zeros((K, d))
    scale = 1.0
    bias = np.zeros(K)
    if K == 1:
        return MulticlassModel(classes, V, bias)
    lam = 1.0 / (C * m)
    rng = np.random.default_rng(rng_seed)
    indptr, indices, data = X.indptr, X.indices, X.data
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(m):
            t += 1
            eta = 1.0 / (lam * t + 1.0)
            lo, hi = indptr[i], indptr[i + 1]
            idx, val = indices[lo:hi], data[lo:hi]
            s = scale * (V[:, idx] @ val) - bias
            s_margin = s + 1.0
            s_margin[yk[i]] -= 1.0
            r = int(np.argmax(s_margin))
            scale *= 1.0 - eta * lam
            if r != yk[i]:
                V[yk[i], idx] += (eta / scale) * val
                V[r, idx] -= (eta / scale) * val
                bias[yk[i]] -= eta
                bias[r] += eta
            if scale < 1e-9:
                V *= scale
                scale = 1.0
    return MulticlassModel(classes, V * scale, bias)


@dataclass
class MulticlassSVM:
    """MulticlassLearner: ``train(X, classes)`` returns a MulticlassModel."""

    C: float = 1.0
    epochs: int = 20
    rng_seed: int = 0

    def train(self, X, y, rng_seed: int | None = None) -> MulticlassModel:
        seed = self.rng_seed if rng_seed is None else rng_seed
        return train_multiclass_reference(X, y, self.C, self.epochs, seed)
