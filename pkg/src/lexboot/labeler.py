"""Occurrence Heuristic: a document gets every category whose lexicon has an
entry occurring in it as a contiguous, case-insensitive token sequence."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, NamedTuple

from .bootstrap import Lexicon
from .corpus import CorpusFormatError, Document, SeedLexicon

__all__ = ["LabelSet", "label_document", "label_corpus", "save_predictions",
           "load_predictions", "PhraseMatcher"]


class LabelSet(NamedTuple):
    document_id: str
    labels: frozenset[str]


class PhraseMatcher:
    """Token-sequence lookup for lexicon entries, keyed by first token."""

    def __init__(self, lexicon: Lexicon | SeedLexicon | Mapping[str, Iterable]):
        if isinstance(lexicon, Lexicon):
            pairs = ((c, e.form) for c, items in lexicon.entries.items() for e in items)
        else:
            mapping = lexicon.entries if isinstance(lexicon, SeedLexicon) else lexicon
            pairs = ((c, tuple(p.lower().split()) if isinstance(p, str) else tuple(p))
                     for c, items in mapping.items() for p in items)
        table: dict[tuple[str, ...], set[str]] = defaultdict(set)
        for category, form in pairs:
            if form:
                table[tuple(w.lower() for w in form)].add(category)
        self._by_first: dict[str, list[tuple[tuple[str, ...], frozenset[str]]]] = defaultdict(list)
        for form, cats in sorted(table.items()):
            self._by_first[form[0]].append((form, frozenset(cats)))

    def matches(self, tokens: list[str]) -> Iterable[tuple[int, tuple[str, ...], frozenset[str]]]:
        """Yield (position, form, categories) for every match in `tokens` (lowercased)."""
        for i, tok in enumerate(tokens):
            for form, cats in self._by_first.get(tok, ()):
                if tuple(tokens[i:i + len(form)]) == form:
                    yield i, form, cats


def _sentence_tokens(doc: Document) -> Iterable[list[str]]:
    for sent in doc.sentences:
        yield [t.surface.lower() for t in sent.tokens]


def label_document(doc: Document, lexicon, matcher: PhraseMatcher | None = None) -> LabelSet:
    matcher = matcher or PhraseMatcher(lexicon)
    labels: set[str] = set()
    for tokens in _sentence_tokens(doc):
        for _, _, cats in matcher.matches(tokens):
            labels |= cats
    return LabelSet(doc.id, frozenset(labels))


def label_corpus(corpus: Iterable[Document], lexicon) -> list[LabelSet]:
    matcher = PhraseMatcher(lexicon)
    return sorted((label_document(d, lexicon, matcher) for d in corpus),
                  key=lambda ls: ls.document_id)


def save_predictions(predictions: Iterable[LabelSet] | Mapping[str, Iterable[str]], path,
                     header: str | None = None) -> None:
    if isinstance(predictions, Mapping):
        predictions = [LabelSet(k, frozenset(v)) for k, v in predictions.items()]
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for ls in sorted(predictions, key=lambda x: x.document_id):
            fh.write(f"{ls.document_id}\t{','.join(sorted(ls.labels))}\n")


def load_predictions(path) -> dict[str, frozenset[str]]:
    out: dict[str, frozenset[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise CorpusFormatError("expected 'doc_id<TAB>labels'", path, lineno)
            if parts[0] in out:
                raise CorpusFormatError(f"duplicate document id {parts[0]!r}", path, lineno)
            out[parts[0]] = frozenset(x.strip() for x in parts[1].split(",") if x.strip())
    return out
