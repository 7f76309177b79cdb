"""Small builders shared by the test modules."""
from __future__ import annotations

import random

from lexboot.corpus import Document, PhraseSpan, Sentence, TaggedToken


def tagged(text: str, phrases=None) -> Sentence:
    """``"the/DT fog/NN"`` -> Sentence; `phrases` are (start, end, kind) triples."""
    toks = []
    for item in text.split():
        surface, _, pos = item.rpartition("/")
        toks.append(TaggedToken(surface, pos))
    spans = None if phrases is None else tuple(PhraseSpan(*p) for p in phrases)
    return Sentence(tuple(toks), spans)


def doc(doc_id: str, *sentences: str, labels=None) -> Document:
    sents = tuple(tagged(s) for s in sentences)
    raw = " ".join(t.surface for s in sents for t in s.tokens)
    return Document(doc_id, raw, sents, None if labels is None else frozenset(labels))


_NOUNS = [f"n{i}" for i in range(14)]
_OTHER = [("of", "IN"), ("in", "IN"), ("was", "VBD"), ("saw", "VBD"), ("the", "DT"),
          ("big", "JJ"), ("and", "CC"), (",", ",")]


def random_tagged_corpus(n_docs: int, seed: int, sentences=(1, 3), length=(4, 9)):
    """Random pre-tagged documents over a tiny vocabulary, dense in shared contexts."""
    rng = random.Random(seed)
    docs = []
    for i in range(n_docs):
        sents = []
        for _ in range(rng.randint(*sentences)):
            toks = []
            for _ in range(rng.randint(*length)):
                if rng.random() < 0.5:
                    toks.append(TaggedToken(rng.choice(_NOUNS), "NN"))
                else:
                    toks.append(TaggedToken(*rng.choice(_OTHER)))
            sents.append(Sentence(tuple(toks)))
        docs.append(Document(f"r{i:03d}", "", tuple(sents)))
    return docs
