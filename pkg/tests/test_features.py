import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import sparse

from lexboot.corpus import make_document
from lexboot.features import (BIGRAM, LEXICON, UNIGRAM, build_feature_space, information_gain,
                              information_gains, save_feature_space, select_features, tfidf,
                              term_count_matrix, vectorize, vectorize_corpus)

from helpers import doc
from oracles import entropy, ig_oracle


def _d(i, text):
    return make_document(f"d{i}", text)


def test_stopwords_unigrams_and_bigrams():
    space = build_feature_space([doc("a", "the/DT runway/NN was/VBD icy/JJ")],
                                stopwords=["the", "was"], include=(UNIGRAM, BIGRAM))
    assert space.features == [(UNIGRAM, "icy"), (UNIGRAM, "runway"), (BIGRAM, "runway icy")]


def test_empty_corpus_gives_empty_space():
    space = build_feature_space([])
    assert len(space) == 0 and space.corpus_size == 0


def test_lexicon_entry_is_one_feature():
    docs = [_d(0, "AN 11 HOUR DUTY DAY."), _d(1, "A SHORT DAY.")]
    space = build_feature_space(docs, include=(UNIGRAM, LEXICON),
                                lexicon={"Duty Cycle": ["11 hour duty day"]})
    assert (LEXICON, "11 hour duty day") in space.index
    assert space.lexicon_entries == ["11 hour duty day"]


def test_lexicon_flag_and_argument_must_agree():
    with pytest.raises(ValueError):
        build_feature_space([], include=(UNIGRAM, LEXICON))
    with pytest.raises(ValueError):
        build_feature_space([], include=(UNIGRAM,), lexicon={"A": ["x"]})
    with pytest.raises(ValueError):
        build_feature_space([], include=("trigram",))


def test_tfidf_weight_twice_with_half_df():
    docs = [_d(0, "FOG FOG RAIN."), _d(1, "RAIN SNOW.")]
    space = build_feature_space(docs)
    vec = vectorize(docs[0], space)
    assert vec[space.index[(UNIGRAM, "fog")]] == pytest.approx(2 * math.log(2))
    # present everywhere -> idf 0
    assert vec.get(space.index[(UNIGRAM, "rain")], 0.0) == 0.0


def test_unseen_features_are_dropped():
    space = build_feature_space([_d(0, "FOG."), _d(1, "RAIN.")])
    assert vectorize(_d(2, "HAIL AND SLEET."), space) == {}


def test_vectorize_independent_of_corpus_order():
    docs = [_d(i, t) for i, t in enumerate(["FOG AND RAIN.", "RAIN.", "SNOW AND FOG.", "HAIL."])]
    a = build_feature_space(docs, include=(UNIGRAM, BIGRAM))
    b = build_feature_space(list(reversed(docs)), include=(UNIGRAM, BIGRAM))
    assert a.features == b.features
    for d in docs:
        assert vectorize(d, a) == vectorize(d, b)
    m = vectorize_corpus(docs, a)
    assert np.all(np.isfinite(m.data)) and np.all(m.data >= 0)
    assert (tfidf(term_count_matrix(docs, a), a) != m).nnz == 0


def test_information_gain_edge_cases():
    labels = [1, 1, 0, 0]
    assert information_gain([True, False, True, False], labels) == 0.0
    assert information_gain([True, True, False, False], labels) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        information_gains(sparse.csr_matrix((0, 1), dtype=bool), [])


def test_information_gain_ten_doc_table():
    # present in 4 docs: 3 positive, 1 negative; absent in 6: 1 positive, 5 negative
    present = [True] * 4 + [False] * 6
    labels = [1, 1, 1, 0] + [1, 0, 0, 0, 0, 0]
    h = entropy([4, 6])
    cond = 0.4 * entropy([3, 1]) + 0.6 * entropy([1, 5])
    assert information_gain(present, labels) == pytest.approx(h - cond)
    assert information_gain(present, labels) == pytest.approx(0.256426, abs=1e-6)


def _ten_feature_space():
    texts = [" ".join(f"W{j}" for j in range(10) if (i >> (j % 4)) & 1 or j == i) + "."
             for i in range(10)]
    docs = [_d(i, t) for i, t in enumerate(texts)]
    labels = [i % 2 for i in range(10)]
    return build_feature_space(docs), labels


def test_select_percent_fifty_keeps_half():
    space, labels = _ten_feature_space()
    assert len(space) == 10
    half = select_features(space, labels, 50)
    assert len(half) == 5
    assert select_features(space, labels, 100).features == space.features
    assert len(select_features(space, labels, 15)) == 2  # ceil(1.5)
    with pytest.raises(ValueError):
        select_features(space, labels, 0)


def test_lexicon_features_survive_selection():
    docs = [_d(0, "FOG AT THE AIRPORT."), _d(1, "RAIN AT NIGHT."), _d(2, "FOG AGAIN.")]
    space = build_feature_space(docs, include=(UNIGRAM, LEXICON), lexicon={"A": ["fog"]})
    kept = select_features(space, [1, 0, 1], 10)
    assert (LEXICON, "fog") in kept.index
    # seven n-grams, ceil(0.7) = 1 kept
    assert len([f for f in kept.features if f[0] != LEXICON]) == 1


def test_unigrams_and_bigrams_ranked_jointly():
    docs = [_d(0, "ALPHA BETA."), _d(1, "GAMMA DELTA."), _d(2, "ALPHA BETA."), _d(3, "GAMMA.")]
    space = build_feature_space(docs, include=(UNIGRAM, BIGRAM))
    assert len(space) == 6
    kept = select_features(space, [1, 0, 1, 0], 40)  # ceil(2.4) = 3 of 6
    # alpha, beta, gamma and "alpha beta" all have IG 1; "alpha beta" sorts before beta
    assert set(kept.features) == {(UNIGRAM, "alpha"), (BIGRAM, "alpha beta"), (UNIGRAM, "beta")}


def test_selection_columns_map_back():
    space, labels = _ten_feature_space()
    sub = select_features(space, labels, 30)
    assert [space.features[j] for j in sub.columns] == sub.features


def test_feature_dump(tmp_path):
    space, labels = _ten_feature_space()
    path = tmp_path / "features.tsv"
    save_feature_space(space, path, labels, header="lexboot test")
    lines = path.read_text().splitlines()
    assert lines[0] == "# lexboot test"
    assert lines[1] == "feature\tkind\tdf\tig"
    assert len(lines) == 12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 2)), min_size=1, max_size=30))
def test_ig_matches_oracle_and_bounds(rows):
    present = [r[0] for r in rows]
    labels = [r[1] for r in rows]
    got = information_gain(present, labels)
    assert got == pytest.approx(ig_oracle(present, labels), abs=1e-12)
    h = entropy(list(np.unique(labels, return_counts=True)[1]))
    assert -1e-12 <= got <= h + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000), st.sampled_from([10, 20, 30, 50, 70, 90]))
def test_selection_is_nested(seed, p):
    rng = np.random.default_rng(seed)
    vocab = [f"W{j}" for j in range(15)]
    docs = [_d(i, " ".join(rng.choice(vocab, size=5)) + ".") for i in range(12)]
    labels = list(rng.integers(0, 2, size=12))
    space = build_feature_space(docs, include=(UNIGRAM, BIGRAM))
    small = set(select_features(space, labels, p).features)
    for q in range(p + 10, 101, 10):
        assert small <= set(select_features(space, labels, q).features)
