"""Documents, text normalization and the on-disk corpus formats.

Incident narratives arrive in all capitals, full of domain abbreviations.
Before any pattern extraction they are tokenized, abbreviations are
expanded from a lookup table, and case is restored with a dictionary of
known words.  Documents may also be supplied already tokenized and tagged,
in which case they are taken as is.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

__all__ = [
    "TaggedToken", "PhraseSpan", "Sentence", "Document", "SeedLexicon",
    "CorpusFormatError", "tokenize", "expand_abbreviations", "restore_case",
    "split_sentences", "naive_tag", "preprocess_text", "make_document",
    "load_corpus", "save_corpus", "load_seed_lexicon", "bundled_seeds",
    "load_abbreviations", "load_wordlist", "PUNCT_TAGS", "NOUN_TAGS",
    "ADJ_TAGS",
]

NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
ADJ_TAGS = frozenset({"JJ", "JJR", "JJS"})
PUNCT_TAGS = frozenset({".", ",", ":", "``", "''", "(", ")", "-LRB-", "-RRB-", "#", "$"})
PHRASE_KINDS = ("NP", "ADJP")
SENTENCE_END = frozenset({".", "!", "?", ";"})


class CorpusFormatError(ValueError):
    """A corpus, seed or lookup file violates its format."""

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class TaggedToken(NamedTuple):
    surface: str
    pos: str


class PhraseSpan(NamedTuple):
    start: int
    end: int  # exclusive
    kind: str = "NP"


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[TaggedToken, ...]
    # None means "not supplied"; the pattern layer falls back to the chunker.
    phrases: tuple[PhraseSpan, ...] | None = None

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence has no tokens")
        for tok in self.tokens:
            if not tok.surface:
                raise ValueError("empty token surface")
        if self.phrases is not None:
            prev_end = 0
            for span in sorted(self.phrases):
                if not 0 <= span.start < span.end <= len(self.tokens):
                    raise ValueError(f"phrase span {tuple(span)} out of bounds")
                if span.start < prev_end:
                    raise ValueError(f"phrase span {tuple(span)} overlaps another span")
                if span.kind not in PHRASE_KINDS:
                    raise ValueError(f"unknown phrase kind {span.kind!r}")
                prev_end = span.end

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


@dataclass(frozen=True)
class Document:
    id: str
    raw_text: str
    sentences: tuple[Sentence, ...]
    labels: frozenset[str] | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id is empty")

    def tokens(self) -> Iterator[TaggedToken]:
        for sent in self.sentences:
            yield from sent.tokens


@dataclass
class SeedLexicon:
    """Category name -> ordered list of seed phrases."""

    entries: dict[str, list[str]] = field(default_factory=dict)

    @property
    def categories(self) -> list[str]:
        return sorted(self.entries)

    def __len__(self):
        return sum(len(v) for v in self.entries.values())


# --- text normalization -----------------------------------------------------

_EDGE_PUNCT = ".,;:!?()\"[]{}"
_TOKEN_RE = re.compile(r"\S+")


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization with leading/trailing punctuation split off.

    Word-internal punctuation is kept, so ``10/28`` and ``DIDN'T`` stay whole.
    """
    out: list[str] = []
    for chunk in _TOKEN_RE.findall(text):
        lead: list[str] = []
        trail: list[str] = []
        while chunk and chunk[0] in _EDGE_PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in _EDGE_PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk)
        out.extend(reversed(trail))
    return out


def expand_abbreviations(tokens: Sequence[str], abbrev_map: Mapping[str, str]) -> list[str]:
    """Replace every token that is exactly a key of `abbrev_map`.

    Expansions may span several tokens (``ATIS`` -> ``Automatic Terminal
    Information Service``).
    """
    out: list[str] = []
    for tok in tokens:
        expansion = abbrev_map.get(tok)
        if expansion is None:
            out.append(tok)
        else:
            out.extend(expansion.split())
    return out


def restore_case(tokens: Sequence[str], dictionary: Iterable[str] | set[str]) -> list[str]:
    """Lowercase all-capital tokens that are known dictionary words.

    ``I`` always stays uppercase.  Tokens that already carry lowercase
    letters (e.g. from abbreviation expansion) are left alone.
    """
    known = dictionary if isinstance(dictionary, (set, frozenset)) else set(dictionary)
    out = []
    for tok in tokens:
        if tok == "I" or tok != tok.upper():
            out.append(tok)
        elif tok.lower() in known:
            out.append(tok.lower())
        else:
            out.append(tok)
    return out


def split_sentences(tokens: Sequence[str]) -> list[list[str]]:
    sentences: list[list[str]] = []
    current: list[str] = []
    for tok in tokens:
        current.append(tok)
        if tok in SENTENCE_END:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


# Closed-class words for the fallback tagger.  Anything else is guessed from
# its shape and suffix, defaulting to a noun.
_CLOSED_CLASS = {
    "DT": "a an the this that these those some any no every each all both another either neither",
    "IN": "of in on at by for with from into onto over under after before during about "
          "above below between through since until upon within without against along across "
          "around behind beyond near off out per via while because although though if than "
          "as whether",
    "CC": "and or but nor yet so",
    "PRP": "i we you he she it they me us him her them myself ourselves itself themselves",
    "PRP$": "my our your his its their",
    "MD": "can could will would shall should may might must",
    "VBD": "was were had did went made said got saw told took",
    "VBZ": "is has does",
    "VBP": "are am have do",
    "VB": "be",
    "VBN": "been",
    "RB": "not very too also just only then there here now never always again still even "
          "soon almost",
    "WDT": "which what",
    "WP": "who whom",
    "WRB": "when where why how",
    "TO": "",
    "EX": "",
}
_CLOSED = {w: tag for tag, words in _CLOSED_CLASS.items() for w in words.split()}
_NUMBER_RE = re.compile(r"^[\d][\d/.,:-]*$")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ant", "ent", "ary")


def naive_tag(tokens: Sequence[str]) -> list[TaggedToken]:
    """Heuristic Penn-style tagging; a fallback, not a real POS tagger."""
    tagged = []
    for tok in tokens:
        low = tok.lower()
        if tok in SENTENCE_END or tok == "!" or tok == "?":
            tag = "."
        elif tok in {",", ";", ":"}:
            tag = "," if tok == "," else ":"
        elif tok in {"(", "["}:
            tag = "("
        elif tok in {")", "]"}:
            tag = ")"
        elif not any(ch.isalnum() for ch in tok):
            tag = ":"
        elif _NUMBER_RE.match(tok):
            tag = "CD"
        elif low in _CLOSED:
            tag = _CLOSED[low]
        elif low == "to":
            tag = "TO"
        elif low.endswith("ly") and len(low) > 4:
            tag = "RB"
        elif low.endswith("ing") and len(low) > 4:
            tag = "VBG"
        elif low.endswith("ed") and len(low) > 4:
            tag = "VBD"
        elif low.endswith(_ADJ_SUFFIXES) and len(low) > 5:
            tag = "JJ"
        elif low.endswith("s") and not low.endswith("ss") and len(low) > 3:
            tag = "NNS"
        else:
            tag = "NN"
        tagged.append(TaggedToken(tok, tag))
    return tagged


def preprocess_text(text: str, abbrev_map: Mapping[str, str] | None = None,
                    dictionary: set[str] | None = None) -> list[list[str]]:
    """Tokenize, expand abbreviations, restore case and split into sentences."""
    tokens = tokenize(text)
    if abbrev_map:
        tokens = expand_abbreviations(tokens, abbrev_map)
    if dictionary is not None:
        tokens = restore_case(tokens, dictionary)
    return split_sentences(tokens)


def make_document(doc_id: str, text: str, labels: Iterable[str] | None = None,
                  abbrev_map: Mapping[str, str] | None = None,
                  dictionary: set[str] | None = None) -> Document:
    """Build a document from raw text using the fallback tagger."""
    sentences = tuple(Sentence(tuple(naive_tag(s)))
                      for s in preprocess_text(text, abbrev_map, dictionary))
    return Document(doc_id, text, sentences, None if labels is None else frozenset(labels))


# --- file formats -------------------------------------------------------------

CORPUS_FORMAT = "lexboot-corpus"


def _record_to_document(rec: dict, path, lineno: int, abbrev_map=None, dictionary=None) -> Document:
    def fail(msg):
        raise CorpusFormatError(msg, path, lineno)

    if not isinstance(rec, dict):
        fail("record is not an object")
    doc_id = rec.get("id")
    if not isinstance(doc_id, str) or not doc_id:
        fail("field 'id' missing or not a non-empty string")
    text = rec.get("text")
    if not isinstance(text, str):
        fail("field 'text' missing or not a string")
    labels = rec.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            fail("field 'labels' must be a list of strings")
        labels = frozenset(labels)

    raw_tokens = rec.get("tokens")
    if raw_tokens is None:
        if rec.get("phrases") is not None:
            fail("field 'phrases' given without 'tokens'")
        return make_document(doc_id, text, labels, abbrev_map, dictionary)

    if not isinstance(raw_tokens, list):
        fail("field 'tokens' must be a list of sentences")
    token_sents = []
    for si, sent in enumerate(raw_tokens):
        if not isinstance(sent, list) or not sent:
            fail(f"tokens[{si}] must be a non-empty list of [surface, pos] pairs")
        toks = []
        for pair in sent:
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(x, str) for x in pair) or not pair[0]):
                fail(f"tokens[{si}] has a malformed [surface, pos] pair: {pair!r}")
            toks.append(TaggedToken(pair[0], pair[1]))
        token_sents.append(toks)

    spans: list[list[PhraseSpan]] | None = None
    raw_phrases = rec.get("phrases")
    if raw_phrases is not None:
        if not isinstance(raw_phrases, list):
            fail("field 'phrases' must be a list")
        spans = [[] for _ in token_sents]
        for item in raw_phrases:
            if (not isinstance(item, list) or len(item) != 4
                    or not all(isinstance(x, int) for x in item[:3])
                    or not isinstance(item[3], str)):
                fail(f"malformed phrase entry {item!r}")
            si, start, end, kind = item
            if not 0 <= si < len(token_sents):
                fail(f"phrase sentence index {si} out of range")
            spans[si].append(PhraseSpan(start, end, kind))
    try:
        sentences = tuple(
            Sentence(tuple(toks), None if spans is None else tuple(sorted(spans[i])))
            for i, toks in enumerate(token_sents))
    except ValueError as exc:
        fail(str(exc))
    return Document(doc_id, text, sentences, labels)


def _document_to_record(doc: Document) -> dict:
    rec: dict = {"id": doc.id, "text": doc.raw_text,
                 "tokens": [[[t.surface, t.pos] for t in s.tokens] for s in doc.sentences]}
    if any(s.phrases is not None for s in doc.sentences):
        rec["phrases"] = [[si, p.start, p.end, p.kind]
                          for si, s in enumerate(doc.sentences) for p in (s.phrases or ())]
    if doc.labels is not None:
        rec["labels"] = sorted(doc.labels)
    return rec


def load_corpus(path, abbrev_map: Mapping[str, str] | None = None,
                dictionary: set[str] | None = None) -> list[Document]:
    """Read a JSON-lines corpus.  A leading header object is skipped.

    Records without ``tokens`` are preprocessed from their text, using
    `abbrev_map` and `dictionary` when given.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", path, lineno) from None
            if isinstance(rec, dict) and "format" in rec and "id" not in rec:
                continue
            doc = _record_to_document(rec, path, lineno, abbrev_map, dictionary)
            if doc.id in seen:
                raise CorpusFormatError(f"duplicate document id {doc.id!r}", path, lineno)
            seen.add(doc.id)
            docs.append(doc)
    return docs


def save_corpus(docs: Iterable[Document], path, header: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(json.dumps({"format": CORPUS_FORMAT, **header}, sort_keys=True) + "\n")
        for doc in docs:
            fh.write(json.dumps(_document_to_record(doc), ensure_ascii=False) + "\n")


def _tsv_lines(path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def load_seed_lexicon(path, on_duplicate: str = "error") -> SeedLexicon:
    """Read ``category<TAB>phrase`` lines.

    A phrase listed under two categories raises unless `on_duplicate` is
    ``"first"``, which keeps the earliest assignment.
    """
    if on_duplicate not in ("error", "first"):
        raise ValueError(f"on_duplicate must be 'error' or 'first', not {on_duplicate!r}")
    entries: dict[str, list[str]] = {}
    owner: dict[str, str] = {}
    for lineno, line in _tsv_lines(path):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise CorpusFormatError("expected 'category<TAB>phrase'", path, lineno)
        category, phrase = parts[0].strip(), " ".join(parts[1].split())
        key = phrase.lower()
        if key in owner:
            if owner[key] == category:
                continue
            if on_duplicate == "error":
                raise CorpusFormatError(
                    f"phrase {phrase!r} assigned to both {owner[key]!r} and {category!r}",
                    path, lineno)
            continue
        owner[key] = category
        entries.setdefault(category, []).append(phrase)
    return SeedLexicon(entries)


def bundled_seeds(on_duplicate: str = "first") -> SeedLexicon:
    """The 177 hand-picked seeds for the 14 aviation shaping factors.

    Two seeds (``inattention``, ``disorientation``) are listed under two
    categories in the source list; by default each keeps its first category.
    """
    return load_seed_lexicon(Path(__file__).with_name("data") / "seeds.tsv", on_duplicate)


def load_abbreviations(path) -> dict[str, str]:
    """``ABBREV<TAB>expansion`` lines; the first expansion listed wins."""
    mapping: dict[str, str] = {}
    for lineno, line in _tsv_lines(path):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise CorpusFormatError("expected 'ABBREV<TAB>expansion'", path, lineno)
        mapping.setdefault(parts[0].strip(), parts[1].strip())
    return mapping


def load_wordlist(path) -> set[str]:
    """One token per line (dictionary or stopword files)."""
    return {line.strip().lower() for _, line in _tsv_lines(path) if line.strip()}
