"""Deterministic synthetic incident narratives for tests and demos.

Each category owns a vocabulary and a handful of sentence templates whose
contexts favour that category.  A document picks one to three categories as
gold labels and writes two or three sentences per label, occasionally using
a word in a neutral template or a template of another category.  All words
are tagged as nouns by the fallback tagger and stand alone as noun phrases.
"""
from __future__ import annotations

import json
import random
from typing import Sequence

from .corpus import Document, SeedLexicon, make_document

__all__ = ["CATEGORY_WORDS", "synthetic_records", "synthetic_corpus", "synthetic_seeds",
           "write_synthetic", "split_ids"]

CATEGORY_WORDS: dict[str, list[str]] = {
    "Physical Environment": ["fog", "snow", "rain", "haze", "wind", "storm", "mist", "sleet",
                             "hail", "frost", "glare", "turbulence", "darkness", "drizzle"],
    "Physical Factors": ["fatigue", "stress", "exhaustion", "insomnia", "workload", "overtime",
                         "jetlag", "drowsiness", "tiredness", "burnout", "anxiety", "illness"],
    "Resource Deficiency": ["autopilot", "radio", "altimeter", "transponder", "gauge", "pump",
                            "valve", "sensor", "display", "generator", "actuator", "breaker"],
    "Communication Environment": ["interference", "chatter", "noise", "garble", "feedback", "echo",
                                  "whistle", "hum", "crosstalk", "silence"],
    "Duty Cycle": ["layover", "curfew", "redeye", "standby", "reserve", "deadhead",
                   "turnaround", "roster", "rotation", "callout"],
}

_TEMPLATES: dict[str, list[str]] = {
    "Physical Environment": ["we encountered {} during descent .",
                             "visibility was reduced by {} near the airport .",
                             "the tower reported {} over the field ."],
    "Physical Factors": ["the crew suffered from {} after the trip .",
                         "the captain experienced {} during the night .",
                         "i noticed {} affecting my judgment ."],
    "Resource Deficiency": ["maintenance replaced the {} after landing .",
                            "we inspected the {} before departure .",
                            "the mechanic deferred the {} until morning ."],
    "Communication Environment": ["the frequency carried {} during the clearance .",
                                  "we received {} on the frequency .",
                                  "the controller ignored {} on the channel ."],
    "Duty Cycle": ["the schedule included a {} before the flight .",
                   "dispatch assigned a {} to the crew .",
                   "the company planned a {} after midnight ."],
}
_NEUTRAL = ["we discussed {} with dispatch .", "the report mentioned {} as a factor ."]
_FILLER = ["the flight continued to the destination .", "we landed without further incident .",
           "the first officer was flying .", "atc cleared us to the runway ."]


def _categories(n_categories: int) -> list[str]:
    if not 1 <= n_categories <= len(CATEGORY_WORDS):
        raise ValueError(f"n_categories must be in 1..{len(CATEGORY_WORDS)}")
    return list(CATEGORY_WORDS)[:n_categories]


def synthetic_seeds(n_categories: int = 3, per_category: int = 3) -> SeedLexicon:
    return SeedLexicon({c: CATEGORY_WORDS[c][:per_category] for c in _categories(n_categories)})


def synthetic_records(n_docs: int, n_categories: int = 3, seed: int = 0,
                      noise: float = 0.15) -> list[dict]:
    """Raw records ``{"id", "text", "labels"}`` in id order."""
    rng = random.Random(seed)
    cats = _categories(n_categories)
    width = len(str(max(n_docs - 1, 0)))
    records = []
    for i in range(n_docs):
        k = rng.choice([1, 1, 2, 2, 3]) if len(cats) > 1 else 1
        labels = sorted(rng.sample(cats, min(k, len(cats))))
        sentences = [rng.choice(_FILLER)]
        for cat in labels:
            for _ in range(rng.randint(2, 3)):
                word = rng.choice(CATEGORY_WORDS[cat])
                r = rng.random()
                if r < noise:
                    template = rng.choice(_NEUTRAL)
                elif r < 1.5 * noise:
                    template = rng.choice(_TEMPLATES[rng.choice(cats)])
                else:
                    template = rng.choice(_TEMPLATES[cat])
                sentences.append(template.format(word))
        rng.shuffle(sentences)
        text = " ".join(s[0].upper() + s[1:] for s in sentences)
        records.append({"id": f"doc{i:0{width}d}", "text": text, "labels": labels})
    return records


def synthetic_corpus(n_docs: int, n_categories: int = 3, seed: int = 0,
                     noise: float = 0.15) -> list[Document]:
    return [make_document(r["id"], r["text"], r["labels"])
            for r in synthetic_records(n_docs, n_categories, seed, noise)]


def write_synthetic(path, n_docs: int, n_categories: int = 3, seed: int = 0,
                    noise: float = 0.15) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in synthetic_records(n_docs, n_categories, seed, noise):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def split_ids(docs: Sequence[Document], fractions: Sequence[float], seed: int = 0):
    """Shuffle documents and cut them into consecutive parts of the given fractions."""
    docs = sorted(docs, key=lambda d: d.id)
    random.Random(seed).shuffle(docs)
    out, start = [], 0
    for j, frac in enumerate(fractions):
        end = len(docs) if j == len(fractions) - 1 else start + int(round(frac * len(docs)))
        out.append(sorted(docs[start:end], key=lambda d: d.id))
        start = end
    return out
