"""N-gram extraction patterns and the co-occurrence index.

Every noun and adjective in a sentence is extracted by (at most) two
patterns: its N preceding words and its N following words.  Noun and
adjective phrases get the same treatment, with leading articles and
possessives stripped from the phrase and skipped over when the left context
is read.  Context windows never cross a sentence boundary or a punctuation
token.

The index aggregates token-level counts for targets, patterns and
(pattern, target) pairs; all bootstrap scores are computed from it.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .corpus import (ADJ_TAGS, NOUN_TAGS, PUNCT_TAGS, CorpusFormatError, Document,
                     PhraseSpan, Sentence)

__all__ = [
    "Target", "Pattern", "SyntacticEvent", "CooccurrenceIndex", "chunk_phrases",
    "extract_word_patterns", "extract_phrase_patterns", "build_index",
    "load_syntactic_events", "parse_syntactic_pattern", "save_index", "load_index",
    "INDEX_FORMAT_VERSION",
]

WORD = "word"
PHRASE = "phrase"
SYNTACTIC = "syntactic"
LEFT = "left"
RIGHT = "right"
SLOT = "<X>"
INDEX_FORMAT_VERSION = 1

# Stripped from the start of phrases and skipped when reading left context.
DETERMINERS = frozenset({"a", "an", "the", "my", "our", "your", "his", "her", "its", "their"})
_EXTRACTABLE = NOUN_TAGS | ADJ_TAGS
_NP_MEMBER = NOUN_TAGS | ADJ_TAGS | {"CD"}


class Target(NamedTuple):
    form: tuple[str, ...]
    kind: str  # "word" or "phrase"

    @property
    def text(self) -> str:
        return " ".join(self.form)


class Pattern(NamedTuple):
    direction: str  # "left": context precedes the slot; "right": context follows it
    context: tuple[str, ...]
    target_kind: str
    origin: str = "ngram"

    def __str__(self):
        if self.origin != "ngram":
            return " ".join(self.context)
        ctx = " ".join(self.context)
        return f"{ctx} {SLOT}" if self.direction == LEFT else f"{SLOT} {ctx}"

    def sort_key(self):
        return (str(self), self.target_kind, self.origin, self.direction)


def _is_barrier(tok) -> bool:
    return tok.pos in PUNCT_TAGS or not any(ch.isalnum() for ch in tok.surface)


def _segment_bounds(tokens) -> tuple[list[int], list[int]]:
    """For each position, the start and end of its punctuation-free segment."""
    n = len(tokens)
    seg_start = [0] * n
    seg_end = [n] * n
    start = 0
    for i, tok in enumerate(tokens):
        if _is_barrier(tok):
            start = i + 1
        seg_start[i] = start
    end = n
    for i in range(n - 1, -1, -1):
        if _is_barrier(tokens[i]):
            end = i
        seg_end[i] = end
    return seg_start, seg_end


def chunk_phrases(sentence: Sentence) -> list[PhraseSpan]:
    """Fallback chunker over Penn tags.

    Noun phrases are maximal runs of adjectives, numbers and nouns, cut after
    their last noun.  Adjectives left over after that cut, or in runs with no
    noun at all, form adjective phrases.  Articles and possessives are never
    inside a span.
    """
    tokens = sentence.tokens
    spans: list[PhraseSpan] = []
    i = 0
    while i < len(tokens):
        if tokens[i].pos not in _NP_MEMBER or tokens[i].surface.lower() in DETERMINERS:
            i += 1
            continue
        j = i
        while (j < len(tokens) and tokens[j].pos in _NP_MEMBER
               and tokens[j].surface.lower() not in DETERMINERS):
            j += 1
        nouns = [k for k in range(i, j) if tokens[k].pos in NOUN_TAGS]
        rest = i
        if nouns:
            spans.append(PhraseSpan(i, nouns[-1] + 1, "NP"))
            rest = nouns[-1] + 1
        k = rest
        while k < j:
            if tokens[k].pos in ADJ_TAGS:
                m = k
                while m < j and tokens[m].pos in ADJ_TAGS:
                    m += 1
                spans.append(PhraseSpan(k, m, "ADJP"))
                k = m
            else:
                k += 1
        i = j
    return spans


def extract_word_patterns(sentence: Sentence, n: int = 2) -> list[tuple[Target, Pattern]]:
    if n < 1:
        raise ValueError("context width must be >= 1")
    tokens = sentence.tokens
    seg_start, seg_end = _segment_bounds(tokens)
    out = []
    for i, tok in enumerate(tokens):
        if tok.pos not in _EXTRACTABLE:
            continue
        target = Target((tok.surface.lower(),), WORD)
        if i - n >= seg_start[i]:
            ctx = tuple(t.surface.lower() for t in tokens[i - n:i])
            out.append((target, Pattern(LEFT, ctx, WORD)))
        if i + 1 + n <= seg_end[i]:
            ctx = tuple(t.surface.lower() for t in tokens[i + 1:i + 1 + n])
            out.append((target, Pattern(RIGHT, ctx, WORD)))
    return out


def _phrase_core(tokens, span: PhraseSpan) -> tuple[int, int]:
    """Span with leading determiners removed, and where left context ends."""
    core = span.start
    while core < span.end and tokens[core].surface.lower() in DETERMINERS:
        core += 1
    ext = core
    while ext > 0 and tokens[ext - 1].surface.lower() in DETERMINERS:
        ext -= 1
    return core, ext


def _sentence_spans(sentence: Sentence) -> Sequence[PhraseSpan]:
    return sentence.phrases if sentence.phrases is not None else chunk_phrases(sentence)


def _phrase_targets(sentence: Sentence) -> Iterator[tuple[Target, int, int, int]]:
    """(target, core start, left-context end, span end) per phrase occurrence."""
    tokens = sentence.tokens
    for span in _sentence_spans(sentence):
        core, ext = _phrase_core(tokens, span)
        if core >= span.end:
            continue
        form = tuple(t.surface.lower() for t in tokens[core:span.end])
        yield Target(form, PHRASE), core, ext, span.end


def extract_phrase_patterns(sentence: Sentence, n: int = 2) -> list[tuple[Target, Pattern]]:
    if n < 1:
        raise ValueError("context width must be >= 1")
    tokens = sentence.tokens
    seg_start, seg_end = _segment_bounds(tokens)
    out = []
    for target, core, ext, end in _phrase_targets(sentence):
        if ext - n >= seg_start[core]:
            ctx = tuple(t.surface.lower() for t in tokens[ext - n:ext])
            out.append((target, Pattern(LEFT, ctx, PHRASE)))
        if end + n <= seg_end[end - 1]:
            ctx = tuple(t.surface.lower() for t in tokens[end:end + n])
            out.append((target, Pattern(RIGHT, ctx, PHRASE)))
    return out


# --- syntactic pattern import ---------------------------------------------------

class SyntacticEvent(NamedTuple):
    doc_id: str
    pattern: str
    target_form: str
    target_kind: str


def parse_syntactic_pattern(pattern: str, target_kind: str) -> Pattern:
    """``"<subject> was arrested"`` -> a right-context syntactic pattern."""
    tokens = tuple(t.lower() for t in pattern.split())
    slots = [i for i, t in enumerate(tokens) if t.startswith("<") and t.endswith(">")]
    if len(slots) != 1:
        raise ValueError(f"pattern {pattern!r} must contain exactly one <slot>")
    direction = RIGHT if slots[0] == 0 else LEFT
    return Pattern(direction, tokens, target_kind, SYNTACTIC)


def load_syntactic_events(path) -> list[SyntacticEvent]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4 or not all(p.strip() for p in parts):
                raise CorpusFormatError(
                    "expected 'doc_id<TAB>pattern<TAB>target_form<TAB>target_kind'", path, lineno)
            if parts[3] not in (WORD, PHRASE):
                raise CorpusFormatError(f"target_kind must be 'word' or 'phrase', got {parts[3]!r}",
                                        path, lineno)
            try:
                parse_syntactic_pattern(parts[1], parts[3])
            except ValueError as exc:
                raise CorpusFormatError(str(exc), path, lineno) from None
            events.append(SyntacticEvent(*parts))
    return events


# --- the index ------------------------------------------------------------------

@dataclass
class CooccurrenceIndex:
    """Token- and type-level co-occurrence statistics.

    ``pattern_targets[P][W]`` is the number of times pattern P extracted
    target W; every other table is derived from it plus the raw target
    occurrence counts.
    """

    target_token_freq: Counter = field(default_factory=Counter)
    pattern_targets: dict = field(default_factory=dict)
    n: int = 2
    kinds: tuple[str, ...] = (WORD, PHRASE)

    def add_occurrence(self, target: Target, count: int = 1) -> None:
        self.target_token_freq[target] += count

    def add_extraction(self, pattern: Pattern, target: Target, count: int = 1) -> None:
        bucket = self.pattern_targets.setdefault(pattern, Counter())
        bucket[target] += count
        self.__dict__.pop("_target_patterns", None)

    def merge(self, other: "CooccurrenceIndex") -> None:
        self.target_token_freq.update(other.target_token_freq)
        for pattern, bucket in other.pattern_targets.items():
            self.pattern_targets.setdefault(pattern, Counter()).update(bucket)
        self.__dict__.pop("_target_patterns", None)

    @property
    def pattern_token_freq(self) -> dict[Pattern, int]:
        return {p: sum(b.values()) for p, b in self.pattern_targets.items()}

    @property
    def pair_token_count(self) -> dict[tuple[Pattern, Target], int]:
        return {(p, t): c for p, b in self.pattern_targets.items() for t, c in b.items()}

    @property
    def pattern_distinct_targets(self) -> dict[Pattern, frozenset[Target]]:
        return {p: frozenset(b) for p, b in self.pattern_targets.items()}

    @property
    def target_patterns(self) -> dict[Target, dict[Pattern, int]]:
        """Inverse view: target -> {pattern: extraction count}."""
        cached = self.__dict__.get("_target_patterns")
        if cached is None:
            cached = defaultdict(dict)
            for p, bucket in self.pattern_targets.items():
                for t, c in bucket.items():
                    cached[t][p] = c
            cached = dict(cached)
            self.__dict__["_target_patterns"] = cached
        return cached

    def pattern_freq(self, pattern: Pattern) -> int:
        try:
            return sum(self.pattern_targets[pattern].values())
        except KeyError:
            raise KeyError(f"unknown pattern {str(pattern)!r}") from None

    def __eq__(self, other):
        if not isinstance(other, CooccurrenceIndex):
            return NotImplemented
        return (self.n == other.n and tuple(self.kinds) == tuple(other.kinds)
                and +self.target_token_freq == +other.target_token_freq
                and {p: +b for p, b in self.pattern_targets.items()}
                == {p: +b for p, b in other.pattern_targets.items()})


def _document_index(doc: Document, kinds: Sequence[str], n: int) -> CooccurrenceIndex:
    idx = CooccurrenceIndex(n=n, kinds=tuple(kinds))
    for sent in doc.sentences:
        for tok in sent.tokens:
            if tok.pos in _EXTRACTABLE:
                idx.add_occurrence(Target((tok.surface.lower(),), WORD))
        for target, *_ in _phrase_targets(sent):
            idx.add_occurrence(target)
        if WORD in kinds:
            for target, pattern in extract_word_patterns(sent, n):
                idx.add_extraction(pattern, target)
        if PHRASE in kinds:
            for target, pattern in extract_phrase_patterns(sent, n):
                idx.add_extraction(pattern, target)
    return idx


def build_index(corpus: Iterable[Document], kinds: Sequence[str] = (PHRASE,), n: int = 2,
                syntactic: Iterable[SyntacticEvent] | None = None) -> CooccurrenceIndex:
    """Aggregate pattern emissions over a corpus.

    `kinds` selects among ``"word"``, ``"phrase"`` and ``"syntactic"``.
    Syntactic patterns are not generated here; they come from `syntactic`,
    one extraction event per item, and every event must name a document of
    the corpus and a target that occurs in it often enough.
    """
    kinds = tuple(kinds)
    unknown = set(kinds) - {WORD, PHRASE, SYNTACTIC}
    if unknown:
        raise ValueError(f"unknown pattern kinds: {sorted(unknown)}")
    if n < 1:
        raise ValueError("context width must be >= 1")
    if SYNTACTIC in kinds and syntactic is None:
        raise ValueError("syntactic patterns enabled but no syntactic events supplied")

    index = CooccurrenceIndex(n=n, kinds=kinds)
    per_doc: dict[str, Counter] = {}
    for doc in sorted(corpus, key=lambda d: d.id):
        part = _document_index(doc, kinds, n)
        index.merge(part)
        per_doc[doc.id] = part.target_token_freq

    if SYNTACTIC in kinds:
        used: dict[str, Counter] = defaultdict(Counter)
        for ev in syntactic:
            if ev.doc_id not in per_doc:
                raise ValueError(f"syntactic event references unknown document {ev.doc_id!r}")
            target = Target(tuple(ev.target_form.lower().split()), ev.target_kind)
            used[ev.doc_id][target] += 1
            if used[ev.doc_id][target] > per_doc[ev.doc_id][target]:
                raise ValueError(f"syntactic event extracts {ev.target_form!r} from document "
                                 f"{ev.doc_id!r} more often than it occurs there")
            index.add_extraction(parse_syntactic_pattern(ev.pattern, ev.target_kind), target)
    return index


# --- persistence ------------------------------------------------------------------

INDEX_FORMAT = "lexboot-index"


def save_index(index: CooccurrenceIndex, path, header: dict | None = None) -> None:
    head = {"format": INDEX_FORMAT, "format_version": INDEX_FORMAT_VERSION,
            "n": index.n, "kinds": list(index.kinds), **(header or {})}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(head, sort_keys=True) + "\n")
        for t in sorted(index.target_token_freq):
            c = index.target_token_freq[t]
            if c:
                fh.write(json.dumps({"target": [list(t.form), t.kind], "freq": c},
                                    ensure_ascii=False) + "\n")
        for p in sorted(index.pattern_targets):
            bucket = index.pattern_targets[p]
            pairs = [[list(t.form), t.kind, bucket[t]] for t in sorted(bucket) if bucket[t]]
            fh.write(json.dumps({"pattern": [p.direction, list(p.context), p.target_kind, p.origin],
                                 "targets": pairs}, ensure_ascii=False) + "\n")


def load_index(path) -> CooccurrenceIndex:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        try:
            head = json.loads(first)
        except json.JSONDecodeError:
            raise CorpusFormatError("missing index header", path, 1) from None
        if head.get("format") != INDEX_FORMAT:
            raise CorpusFormatError("not an index file", path, 1)
        if head.get("format_version") != INDEX_FORMAT_VERSION:
            raise CorpusFormatError(f"unsupported index format version {head.get('format_version')}",
                                    path, 1)
        index = CooccurrenceIndex(n=head["n"], kinds=tuple(head["kinds"]))
        for lineno, line in enumerate(fh, 2):
            try:
                rec = json.loads(line)
                if "target" in rec:
                    form, kind = rec["target"]
                    index.add_occurrence(Target(tuple(form), kind), rec["freq"])
                else:
                    direction, ctx, kind, origin = rec["pattern"]
                    pattern = Pattern(direction, tuple(ctx), kind, origin)
                    for form, tkind, c in rec["targets"]:
                        index.add_extraction(pattern, Target(tuple(form), tkind), c)
            except (json.JSONDecodeError, KeyError, ValueError, TypeError):
                raise CorpusFormatError("malformed index record", path, lineno) from None
    return index
