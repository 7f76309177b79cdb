"""Bootstrapped lexicon induction.

Two loops share the same pattern-pool machinery:

* :func:`bootstrap_original` ranks pattern pools by RlogF, builds one word
  pool per category and adds the five best candidates per category by the
  ``diff`` of AvgLog scores.
* :func:`bootstrap_modified` filters patterns and candidates by frequency
  thresholds, pools all candidates together, assigns each to the category
  with the highest SemProb and adds up to ``per_category_cap`` per category.

Lexicon membership is by lowercased token sequence, so a seed ``fog``
matches both the word target ``fog`` and the one-token phrase ``fog``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import CorpusFormatError, SeedLexicon
from .patterns import CooccurrenceIndex, Pattern, Target

__all__ = [
    "LexiconEntry", "Lexicon", "Thresholds", "THRESHOLD_COMBINATIONS",
    "rlogf", "avglog", "diff_score", "semprob", "select_pattern_pool",
    "bootstrap_original", "bootstrap_modified", "save_lexicon", "load_lexicon",
]

Form = tuple[str, ...]
NEG_INF = float("-inf")


def _form(phrase: str | Sequence[str]) -> Form:
    if isinstance(phrase, str):
        return tuple(phrase.lower().split())
    return tuple(w.lower() for w in phrase)


@dataclass(frozen=True)
class LexiconEntry:
    form: Form
    iteration_added: int = 0
    score: float = 0.0

    def __post_init__(self):
        if not self.form:
            raise ValueError("empty lexicon entry")
        if self.iteration_added < 0:
            raise ValueError("iteration_added must be >= 0")

    @property
    def text(self) -> str:
        return " ".join(self.form)


class Lexicon:
    """Category -> ordered entries, with every form owned by one category."""

    def __init__(self, categories: Iterable[str] = ()):
        self.entries: dict[str, list[LexiconEntry]] = {c: [] for c in categories}
        self._owner: dict[Form, str] = {}

    @classmethod
    def from_seeds(cls, seeds: SeedLexicon | Mapping[str, Iterable[str]]) -> "Lexicon":
        mapping = seeds.entries if isinstance(seeds, SeedLexicon) else seeds
        lex = cls(sorted(mapping))
        for category in sorted(mapping):
            for phrase in mapping[category]:
                form = _form(phrase)
                if lex._owner.get(form) == category:
                    continue
                lex.add(category, LexiconEntry(form))
        return lex

    @property
    def categories(self) -> list[str]:
        return sorted(self.entries)

    def add(self, category: str, entry: LexiconEntry) -> None:
        owner = self._owner.get(entry.form)
        if owner is not None:
            raise ValueError(f"{entry.text!r} already belongs to {owner!r}")
        self.entries.setdefault(category, []).append(entry)
        self._owner[entry.form] = category

    def owner(self, form: Form | str) -> str | None:
        return self._owner.get(_form(form))

    def forms(self, category: str) -> set[Form]:
        return {e.form for e in self.entries.get(category, ())}

    def __contains__(self, form) -> bool:
        return _form(form) in self._owner

    def __len__(self):
        return len(self._owner)

    def copy(self) -> "Lexicon":
        new = Lexicon(self.entries)
        for c, items in self.entries.items():
            new.entries[c] = list(items)
        new._owner = dict(self._owner)
        return new

    def as_dict(self) -> dict[str, list[str]]:
        return {c: [e.text for e in items] for c, items in sorted(self.entries.items())}

    def __eq__(self, other):
        if not isinstance(other, Lexicon):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self):
        sizes = ", ".join(f"{c}: {len(v)}" for c, v in sorted(self.entries.items()))
        return f"Lexicon({sizes})"


@dataclass(frozen=True)
class Thresholds:
    """Frequency constraints of the modified loop.

    min/max_word_freq bound a candidate's corpus frequency; min_pattern_freq
    is the least number of times a pooled pattern must occur and
    max_pattern_distinct_targets caps how many distinct targets it extracts.
    """

    min_word_freq: int = 10
    max_word_freq: int = 2500
    min_pattern_freq: int = 250
    max_pattern_distinct_targets: int = 100

    def __post_init__(self):
        values = (self.min_word_freq, self.max_word_freq, self.min_pattern_freq,
                  self.max_pattern_distinct_targets)
        if any(v < 1 for v in values):
            raise ValueError("thresholds must be positive integers")
        if self.min_word_freq > self.max_word_freq:
            raise ValueError("min_word_freq must not exceed max_word_freq")


THRESHOLD_COMBINATIONS = {
    1: Thresholds(25, 2500, 250, 100),
    2: Thresholds(25, 2500, 100, 100),
    3: Thresholds(10, 2500, 250, 100),
    4: Thresholds(10, 2500, 250, 250),
    5: Thresholds(10, 5000, 250, 100),
}


# --- scores -----------------------------------------------------------------------

def _rlogf_value(f: int, n: int) -> float:
    if f == 0:
        return NEG_INF
    return f / n * math.log2(f)


def _avglog_value(fs: Iterable[int]) -> float:
    fs = list(fs)
    return sum(math.log2(f + 1) for f in fs) / len(fs)


def _targets_of(index: CooccurrenceIndex, pattern: Pattern):
    try:
        return index.pattern_targets[pattern]
    except KeyError:
        raise KeyError(f"unknown pattern {str(pattern)!r}") from None


def rlogf(pattern: Pattern, category: str, index: CooccurrenceIndex, lexicon: Lexicon) -> float:
    """(F/N)·log2(F) over distinct targets; -inf when F = 0."""
    targets = _targets_of(index, pattern)
    members = lexicon.forms(category)
    f = sum(1 for t in targets if t.form in members)
    return _rlogf_value(f, len(targets))


def _patterns_of(index: CooccurrenceIndex, word: Target) -> dict[Pattern, int]:
    pats = index.target_patterns.get(word)
    if not pats:
        raise ValueError(f"{word.text!r} is not extracted by any pattern")
    return pats


def avglog(word: Target, category: str, index: CooccurrenceIndex, lexicon: Lexicon) -> float:
    members = lexicon.forms(category)
    fs = [sum(1 for t in index.pattern_targets[p] if t.form in members)
          for p in _patterns_of(index, word)]
    return _avglog_value(fs)


def _diff(scores: Mapping[str, float], category: str) -> float:
    others = [v for c, v in scores.items() if c != category]
    return scores[category] - max(others) if others else scores[category]


def diff_score(word: Target, category: str, index: CooccurrenceIndex, lexicon: Lexicon,
               all_categories: Iterable[str] | None = None) -> float:
    cats = list(all_categories) if all_categories is not None else lexicon.categories
    if category not in cats:
        cats.append(category)
    scores = {c: avglog(word, c, index, lexicon) for c in cats}
    return _diff(scores, category)


def semprob(word: Target, category: str, index: CooccurrenceIndex, lexicon: Lexicon,
            denominator: str = "frequency") -> float:
    """Σ_P Prob(category | P) · Prob(P | word), maximum-likelihood estimates.

    Prob(P | word) divides the pair count by the word's corpus frequency
    (``denominator="frequency"``) or by its total number of extractions
    (``"extractions"``); the latter keeps the sum over patterns at exactly 1
    when a word is extracted by both a left and a right pattern.
    """
    freq = index.target_token_freq.get(word, 0)
    if freq <= 0:
        raise ValueError(f"{word.text!r} has zero corpus frequency")
    pats = index.target_patterns.get(word, {})
    if denominator == "extractions":
        freq = sum(pats.values())
        if not freq:
            return 0.0
    elif denominator != "frequency":
        raise ValueError(f"unknown denominator {denominator!r}")
    members = lexicon.forms(category)
    total = 0.0
    for p, pair in pats.items():
        bucket = index.pattern_targets[p]
        in_cat = sum(c for t, c in bucket.items() if t.form in members)
        total += in_cat / sum(bucket.values()) * pair / freq
    return total


# --- per-iteration statistics -----------------------------------------------------------

class _Stats:
    """Lexicon-dependent pattern statistics, computed once per iteration."""

    def __init__(self, index: CooccurrenceIndex, lexicon: Lexicon):
        self.index = index
        self.lexicon = lexicon
        self.distinct: dict[Pattern, dict[str, int]] = {}
        self.tokens: dict[Pattern, dict[str, int]] = {}
        self.freq: dict[Pattern, int] = {}
        self.depleted: set[Pattern] = set()
        for p, bucket in index.pattern_targets.items():
            distinct: dict[str, int] = defaultdict(int)
            tokens: dict[str, int] = defaultdict(int)
            known = 0
            for t, c in bucket.items():
                cat = lexicon.owner(t.form)
                if cat is not None:
                    distinct[cat] += 1
                    tokens[cat] += c
                    known += 1
            self.distinct[p] = distinct
            self.tokens[p] = tokens
            self.freq[p] = sum(bucket.values())
            if known == len(bucket):
                self.depleted.add(p)

    def pattern_pool(self, category: str, iteration: int,
                     thresholds: Thresholds | None) -> list[Pattern]:
        scored = []
        for p, bucket in self.index.pattern_targets.items():
            f = self.distinct[p].get(category, 0)
            if f == 0 or p in self.depleted:
                continue
            if thresholds is not None and (
                    self.freq[p] < thresholds.min_pattern_freq
                    or len(bucket) > thresholds.max_pattern_distinct_targets):
                continue
            scored.append((-_rlogf_value(f, len(bucket)), p.sort_key(), p))
        scored.sort(key=lambda x: (x[0], x[1]))
        return [p for *_, p in scored[:20 + iteration]]

    def avglog(self, word: Target, category: str) -> float:
        return _avglog_value(self.distinct[p].get(category, 0)
                             for p in _patterns_of(self.index, word))

    def semprob(self, word: Target, category: str, denominator: str) -> float:
        pats = self.index.target_patterns.get(word, {})
        if denominator == "extractions":
            freq = sum(pats.values())
        else:
            freq = self.index.target_token_freq.get(word, 0)
        if not freq:
            return 0.0
        return sum(self.tokens[p].get(category, 0) / self.freq[p] * pair / freq
                   for p, pair in pats.items())


def select_pattern_pool(category: str, iteration: int, index: CooccurrenceIndex,
                        lexicon: Lexicon, thresholds: Thresholds | None = None) -> list[Pattern]:
    """Top (20 + iteration) non-depleted patterns for `category` by RlogF.

    Patterns extracting no member of the category are never pooled.  With
    `thresholds`, patterns occurring fewer than ``min_pattern_freq`` times or
    extracting more than ``max_pattern_distinct_targets`` distinct targets
    are skipped.  Ties go to the lexicographically smaller pattern string.
    """
    if iteration < 1:
        raise ValueError("iteration numbers start at 1")
    return _Stats(index, lexicon).pattern_pool(category, iteration, thresholds)


# --- the two loops ---------------------------------------------------------------------

def _claim(best: dict, form: Form, key: tuple, payload) -> None:
    if form not in best or key < best[form][0]:
        best[form] = (key, payload)


def _commit(lexicon: Lexicon, best: dict, iteration: int, cap: int) -> None:
    per_cat: dict[str, list] = defaultdict(list)
    for key, (category, target, score) in best.values():
        per_cat[category].append((-score, target.text, target.kind, target, score))
    for category in sorted(per_cat):
        ranked = sorted(per_cat[category], key=lambda x: x[:3])
        for *_, target, score in ranked[:cap]:
            lexicon.add(category, LexiconEntry(target.form, iteration, score))


def _start(seeds) -> Lexicon:
    return seeds.copy() if isinstance(seeds, Lexicon) else Lexicon.from_seeds(seeds)


def bootstrap_original(seeds: SeedLexicon | Lexicon, index: CooccurrenceIndex,
                       iterations: int, per_category: int = 5) -> Lexicon:
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    lexicon = _start(seeds)
    categories = lexicon.categories
    for i in range(1, iterations + 1):
        stats = _Stats(index, lexicon)
        pools: dict[Target, set[str]] = defaultdict(set)
        for category in categories:
            for p in stats.pattern_pool(category, i, None):
                for t in index.pattern_targets[p]:
                    if t.form not in lexicon:
                        pools[t].add(category)

        best: dict = {}
        for target, in_pools in pools.items():
            avg = {c: stats.avglog(target, c) for c in categories}
            for category in in_pools:
                score = _diff(avg, category)
                _claim(best, target.form, (-score, category, target.kind),
                       (category, target, score))
        _commit(lexicon, best, i, per_category)
    return lexicon


def bootstrap_modified(seeds: SeedLexicon | Lexicon, index: CooccurrenceIndex,
                       iterations: int, thresholds: Thresholds = Thresholds(),
                       per_category_cap: int = 5, denominator: str = "frequency") -> Lexicon:
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if denominator not in ("frequency", "extractions"):
        raise ValueError(f"unknown denominator {denominator!r}")
    lexicon = _start(seeds)
    categories = lexicon.categories
    for i in range(1, iterations + 1):
        stats = _Stats(index, lexicon)
        pool: set[Target] = set()
        for category in categories:
            for p in stats.pattern_pool(category, i, thresholds):
                for t in index.pattern_targets[p]:
                    freq = index.target_token_freq.get(t, 0)
                    if (t.form not in lexicon
                            and thresholds.min_word_freq <= freq <= thresholds.max_word_freq):
                        pool.add(t)

        best: dict = {}
        for target in pool:
            scored = sorted((-stats.semprob(target, c, denominator), c) for c in categories)
            neg, category = scored[0]
            _claim(best, target.form, (neg, category, target.kind), (category, target, -neg))
        _commit(lexicon, best, i, per_category_cap)
    return lexicon


# --- lexicon files ------------------------------------------------------------------------

def save_lexicon(lexicon: Lexicon, path, header: str | None = None) -> None:
    rows = sorted(((c, e.iteration_added, -e.score, e.text) for c, items in lexicon.entries.items()
                   for e in items))
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for c, it, neg, text in rows:
            fh.write(f"{c}\t{text}\t{it}\t{repr(-neg + 0.0)}\n")


def load_lexicon(path) -> Lexicon:
    lexicon = Lexicon()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            try:
                category, text, it, score = parts
                lexicon.add(category, LexiconEntry(_form(text), int(it), float(score)))
            except ValueError as exc:
                raise CorpusFormatError(f"bad lexicon row ({exc})", path, lineno) from None
    return lexicon
