import json

import pytest
from hypothesis import given, strategies as st

from lexboot.corpus import (CorpusFormatError, Document, PhraseSpan, Sentence, TaggedToken,
                            bundled_seeds, expand_abbreviations, load_abbreviations,
                            load_corpus, load_seed_lexicon, load_wordlist, make_document,
                            naive_tag, preprocess_text, restore_case, save_corpus,
                            split_sentences, tokenize)

ABBREV = {"RWY": "runway", "XING": "crossing", "HVY": "heavy",
          "ATIS": "automatic terminal information service"}


def test_expand_abbreviations_examples():
    assert expand_abbreviations(["CROSSED", "RWY"], ABBREV) == ["CROSSED", "runway"]
    assert expand_abbreviations([], ABBREV) == []
    assert expand_abbreviations(["XING"], ABBREV) == ["crossing"]


def test_expansion_may_span_several_tokens():
    assert expand_abbreviations(["ATIS", "X"], ABBREV) == [
        "automatic", "terminal", "information", "service", "X"]


def test_expansion_is_case_sensitive():
    assert expand_abbreviations(["rwy"], ABBREV) == ["rwy"]


def test_restore_case_examples():
    dictionary = {"from", "the", "ramp", "at", "runway", "was", "crossing", "which"}
    toks = ["TAXIING", "FROM", "THE", "RAMP", "AT", "LAF"]
    assert restore_case(toks, dictionary) == ["TAXIING", "from", "the", "ramp", "at", "LAF"]
    assert restore_case(["I"], dictionary | {"i"}) == ["I"]
    assert restore_case(["WHICH", "RUNWAY", "I", "WAS", "CROSSING"], dictionary) == \
        ["which", "runway", "I", "was", "crossing"]


def test_split_sentences_examples():
    assert split_sentences(["made", "a", "turn", ".", "held", "short", "."]) == \
        [["made", "a", "turn", "."], ["held", "short", "."]]
    assert split_sentences([]) == []
    assert split_sentences(["no", "punctuation"]) == [["no", "punctuation"]]


def test_tokenize_splits_edge_punctuation_only():
    assert tokenize("CROSSED RWY 10/28, THEN STOPPED.") == \
        ["CROSSED", "RWY", "10/28", ",", "THEN", "STOPPED", "."]
    assert tokenize("DIDN'T (SEE) IT") == ["DIDN'T", "(", "SEE", ")", "IT"]


def test_preprocess_pipeline_matches_worked_output():
    dictionary = {"made", "a", "wrong", "turn", "and", "crossed", "runway", "which",
                  "was", "crossing"}
    sents = preprocess_text("MADE A WRONG TURN AND CROSSED RWY 10/28.", ABBREV, dictionary)
    assert sents == [["made", "a", "wrong", "turn", "and", "crossed", "runway", "10/28", "."]]


def test_naive_tag_basic_shapes():
    tags = [t.pos for t in naive_tag(["the", "runway", "was", "icy", "10/28", ".", "to"])]
    assert tags == ["DT", "NN", "VBD", "NN", "CD", ".", "TO"]


def test_sentence_invariants():
    tok = TaggedToken("fog", "NN")
    with pytest.raises(ValueError):
        Sentence(())
    with pytest.raises(ValueError):
        Sentence((tok,), (PhraseSpan(0, 2),))
    with pytest.raises(ValueError):
        Sentence((tok, tok, tok), (PhraseSpan(0, 2), PhraseSpan(1, 3)))
    with pytest.raises(ValueError):
        Sentence((tok,), (PhraseSpan(0, 1, "VP"),))
    with pytest.raises(ValueError):
        Document("", "", ())


def _write(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def test_load_one_record_corpus(tmp_path):
    p = _write(tmp_path / "c.jsonl", [json.dumps({"id": "a", "text": "FOG ON THE FIELD."})])
    docs = load_corpus(p)
    assert len(docs) == 1 and docs[0].id == "a"
    assert docs[0].labels is None


def test_load_corpus_duplicate_id_names_line(tmp_path):
    rec = json.dumps({"id": "a", "text": "x"})
    p = _write(tmp_path / "c.jsonl", [rec, rec])
    with pytest.raises(CorpusFormatError, match=r":2: duplicate document id"):
        load_corpus(p)


@pytest.mark.parametrize("record, message", [
    ({"text": "x"}, "'id'"),
    ({"id": "a"}, "'text'"),
    ({"id": "a", "text": "x", "labels": "A"}, "'labels'"),
    ({"id": "a", "text": "x", "tokens": [[["fog"]]]}, "malformed"),
    ({"id": "a", "text": "x", "tokens": [[["fog", "NN"]]], "phrases": [[0, 0, 2, "NP"]]},
     "out of bounds"),
    ({"id": "a", "text": "x", "phrases": []}, "without 'tokens'"),
])
def test_load_corpus_schema_errors(tmp_path, record, message):
    p = _write(tmp_path / "c.jsonl", [json.dumps(record)])
    with pytest.raises(CorpusFormatError, match=message):
        load_corpus(p)


def test_load_corpus_bad_json(tmp_path):
    p = _write(tmp_path / "c.jsonl", ["{not json"])
    with pytest.raises(CorpusFormatError, match=":1:"):
        load_corpus(p)


def test_corpus_round_trip(tmp_path):
    d1 = make_document("b", "HEAVY RAIN. WE DIVERTED.", ["Physical Environment"])
    d2 = Document("a", "fog", (Sentence((TaggedToken("dense", "JJ"), TaggedToken("fog", "NN")),
                                        (PhraseSpan(0, 2, "NP"),)),))
    path = tmp_path / "c.jsonl"
    save_corpus([d1, d2], path, header={"note": "x"})
    assert load_corpus(path) == [d1, d2]


def test_load_corpus_applies_abbreviations(tmp_path):
    p = _write(tmp_path / "c.jsonl", [json.dumps({"id": "a", "text": "HVY RAIN ON RWY"})])
    docs = load_corpus(p, ABBREV, {"rain", "on"})
    assert [t.surface for t in docs[0].tokens()] == ["heavy", "rain", "on", "runway"]


def test_seed_lexicon_loading(tmp_path):
    p = _write(tmp_path / "s.tsv", ["# comment", "Duty Cycle\t11 hour duty day"])
    seeds = load_seed_lexicon(p)
    assert seeds.entries == {"Duty Cycle": ["11 hour duty day"]}


def test_seed_lexicon_duplicate_phrase(tmp_path):
    p = _write(tmp_path / "s.tsv", ["A\tfog", "B\tFog"])
    with pytest.raises(CorpusFormatError, match="both"):
        load_seed_lexicon(p)
    assert load_seed_lexicon(p, on_duplicate="first").entries == {"A": ["fog"]}


def test_seed_lexicon_malformed_line(tmp_path):
    p = _write(tmp_path / "s.tsv", ["A fog"])
    with pytest.raises(CorpusFormatError, match=":1:"):
        load_seed_lexicon(p)


def test_bundled_seeds_cover_fourteen_categories():
    seeds = bundled_seeds()
    assert len(seeds.categories) == 14
    # 177 listed phrases, two of them under two categories each
    assert len(seeds) == 175
    assert "11 hour duty day" in seeds.entries["Duty Cycle"]
    assert "fatigue" in seeds.entries["Physical Factors"]


def test_bundled_seed_file_has_known_duplicates():
    with pytest.raises(CorpusFormatError):
        bundled_seeds(on_duplicate="error")


def test_abbreviation_file_first_wins(tmp_path):
    p = _write(tmp_path / "a.tsv", ["HVY\theavy", "HVY\theavily", "# x", "RWY\trunway"])
    assert load_abbreviations(p) == {"HVY": "heavy", "RWY": "runway"}


def test_wordlist(tmp_path):
    p = _write(tmp_path / "w.txt", ["the", "A", ""])
    assert load_wordlist(p) == {"the", "a"}


_upper = st.text(alphabet="ABCDEFGHIJ", min_size=1, max_size=5)


@given(st.lists(_upper, max_size=12), st.sets(st.text(alphabet="abcdefghij", min_size=1,
                                                      max_size=5)))
def test_restore_case_idempotent(tokens, dictionary):
    once = restore_case(tokens, dictionary)
    assert restore_case(once, dictionary) == once
    assert len(once) == len(tokens)


@given(st.lists(st.sampled_from(["RWY", "XING", "HVY", "FOG", "I", "ON"]), max_size=12))
def test_expand_abbreviations_idempotent_and_length(tokens):
    simple = {"RWY": "runway", "XING": "crossing", "HVY": "heavy"}
    once = expand_abbreviations(tokens, simple)
    assert expand_abbreviations(once, simple) == once
    assert len(once) == len(tokens)
