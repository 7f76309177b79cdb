import pytest

from lexboot.corpus import load_corpus, naive_tag
from lexboot.synthetic import (CATEGORY_WORDS, split_ids, synthetic_corpus, synthetic_records,
                               synthetic_seeds, write_synthetic)


def test_records_are_deterministic_and_labeled():
    a = synthetic_records(30, 4, seed=9)
    assert a == synthetic_records(30, 4, seed=9)
    assert a != synthetic_records(30, 4, seed=10)
    assert [r["id"] for r in a] == [f"doc{i:02d}" for i in range(30)]
    cats = set(list(CATEGORY_WORDS)[:4])
    assert all(r["labels"] and set(r["labels"]) <= cats for r in a)


def test_every_vocabulary_word_tags_as_noun():
    for words in CATEGORY_WORDS.values():
        assert all(t.pos == "NN" for t in naive_tag(words))


def test_seeds_and_bounds():
    seeds = synthetic_seeds(2, per_category=2)
    assert seeds.entries == {c: CATEGORY_WORDS[c][:2] for c in list(CATEGORY_WORDS)[:2]}
    with pytest.raises(ValueError):
        synthetic_records(5, 0)
    with pytest.raises(ValueError):
        synthetic_records(5, len(CATEGORY_WORDS) + 1)


def test_written_file_loads(tmp_path):
    path = tmp_path / "raw.jsonl"
    write_synthetic(path, 12, seed=1)
    assert load_corpus(path) == synthetic_corpus(12, seed=1)


def test_split_is_a_partition():
    docs = synthetic_corpus(50, seed=2)
    parts = split_ids(docs, [0.6, 0.2, 0.2], seed=4)
    assert [len(p) for p in parts] == [30, 10, 10]
    assert sorted(d.id for p in parts for d in p) == sorted(d.id for d in docs)
    assert split_ids(docs, [0.6, 0.2, 0.2], seed=4) == parts
