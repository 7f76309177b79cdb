import numpy as np
import pytest
from scipy import sparse

from lexboot.learners import (LinearSVM, MulticlassModel, MulticlassSVM, train_linear_reference,
                              train_multiclass_reference)


def _blobs(seed=0, n=40):
    rng = np.random.default_rng(seed)
    pos = rng.normal([2.0, 2.0], 0.4, size=(n, 2))
    neg = rng.normal([-2.0, -1.0], 0.4, size=(n, 2))
    return np.vstack([pos, neg]), np.array([1] * n + [-1] * n)


def test_same_seed_same_model():
    X, y = _blobs()
    assert train_linear_reference(X, y, rng_seed=3) == train_linear_reference(X, y, rng_seed=3)
    assert LinearSVM(rng_seed=1).train(X, y) == LinearSVM().train(X, y, rng_seed=1)


def test_different_seed_usually_differs():
    X, y = _blobs()
    a = train_linear_reference(X, y, rng_seed=0)
    b = train_linear_reference(X, y, rng_seed=1)
    assert not np.array_equal(a.weights, b.weights)


def test_single_positive_point():
    x = np.array([[1.0, 0.5, -2.0]])
    model = train_linear_reference(x, [1])
    d = model.decision(np.vstack([x, -x]))
    assert d[0] > d[1]


def test_sparse_and_dense_inputs_agree():
    X, y = _blobs()
    a = train_linear_reference(X, y)
    b = train_linear_reference(sparse.csr_matrix(X), y)
    assert a == b
    assert np.allclose(a.decision(X), a.decision(sparse.csr_matrix(X)))


@pytest.mark.parametrize("X, y, C", [
    (np.zeros((0, 2)), [], 1.0),
    (np.ones((2, 2)), [1, 0], 1.0),
    (np.ones((2, 2)), [1, -1], 0.0),
    (np.ones((2, 2)), [1], 1.0),
])
def test_binary_input_errors(X, y, C):
    with pytest.raises(ValueError):
        train_linear_reference(X, y, C)


def test_multiclass_separable_three_classes():
    rng = np.random.default_rng(4)
    centers = {"a": [3, 0], "b": [-3, 0], "c": [0, 3]}
    X = np.vstack([rng.normal(c, 0.3, size=(20, 2)) for c in centers.values()])
    y = [k for k in centers for _ in range(20)]
    model = MulticlassSVM(epochs=30).train(X, y)
    assert model.classes == ["a", "b", "c"]
    assert model.predict(X) == y
    assert model == train_multiclass_reference(X, y, epochs=30)


def test_multiclass_single_class_and_ties():
    model = train_multiclass_reference(np.ones((3, 2)), ["only"] * 3)
    assert model.predict(np.ones((2, 2))) == ["only", "only"]
    tie = MulticlassModel(["x", "y"], np.zeros((2, 2)), np.zeros(2))
    assert tie.predict([[1.0, 1.0]]) == ["x"]
    with pytest.raises(ValueError):
        train_multiclass_reference(np.zeros((0, 2)), [])
