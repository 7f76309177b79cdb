"""Micro-averaged scoring and paired significance tests for labelings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "EvalCounts", "count", "micro_prf", "prf", "correctness", "mcnemar",
    "approx_randomization", "write_metrics_report", "write_significance_report",
    "chi2_sf_1df",
]

Labeling = Mapping[str, Iterable[str]]


@dataclass
class EvalCounts:
    """Per-category gold (n), predicted (p) and correct (tp) document counts."""

    categories: list[str]
    n: dict[str, int]
    p: dict[str, int]
    tp: dict[str, int]
    docs: int

    def __post_init__(self):
        for c in self.categories:
            if min(self.n[c], self.p[c], self.tp[c]) < 0:
                raise ValueError(f"negative count for {c!r}")
            if self.tp[c] > min(self.n[c], self.p[c]):
                raise ValueError(f"tp exceeds n or p for {c!r}")

    @classmethod
    def from_confusion(cls, rows: Mapping[str, tuple[int, int, int]], docs: int) -> "EvalCounts":
        """Build from per-category (tp, fn, fp) triples."""
        cats = list(rows)
        return cls(cats, {c: rows[c][0] + rows[c][1] for c in cats},
                   {c: rows[c][0] + rows[c][2] for c in cats},
                   {c: rows[c][0] for c in cats}, docs)

    def fp(self, c: str) -> int:
        return self.p[c] - self.tp[c]

    def fn(self, c: str) -> int:
        return self.n[c] - self.tp[c]

    def tn(self, c: str) -> int:
        return self.docs - self.n[c] - self.fp(c)

    def totals(self) -> tuple[int, int, int]:
        """(Σtp, Σp, Σn)."""
        return (sum(self.tp.values()), sum(self.p.values()), sum(self.n.values()))

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        cats = sorted(set(self.categories) | set(other.categories))
        get = lambda d, c: d.get(c, 0)  # noqa: E731
        return EvalCounts(cats, {c: get(self.n, c) + get(other.n, c) for c in cats},
                          {c: get(self.p, c) + get(other.p, c) for c in cats},
                          {c: get(self.tp, c) + get(other.tp, c) for c in cats},
                          self.docs + other.docs)


def _ratio(a: float, b: float) -> float:
    return a / b if b else 0.0


def prf(tp: int, p: int, n: int) -> tuple[float, float, float]:
    precision, recall = _ratio(tp, p), _ratio(tp, n)
    f = _ratio(2 * precision * recall, precision + recall)
    return precision, recall, f


def count(predictions: Labeling, gold: Labeling, categories: Sequence[str] | None = None) -> EvalCounts:
    if set(predictions) != set(gold):
        missing = sorted(set(gold) ^ set(predictions))
        raise ValueError(f"predictions and gold cover different documents: {missing[:5]}")
    if categories is None:
        categories = sorted({c for v in gold.values() for c in v}
                            | {c for v in predictions.values() for c in v})
    cats = list(categories)
    n = dict.fromkeys(cats, 0)
    p = dict.fromkeys(cats, 0)
    tp = dict.fromkeys(cats, 0)
    for doc_id, gold_labels in gold.items():
        g, pr = set(gold_labels), set(predictions[doc_id])
        for c in cats:
            n[c] += c in g
            p[c] += c in pr
            tp[c] += c in g and c in pr
    return EvalCounts(cats, n, p, tp, len(gold))


def micro_prf(counts: EvalCounts) -> tuple[float, float, float]:
    tp, p, n = counts.totals()
    return prf(tp, p, n)


# --- significance ----------------------------------------------------------------------

def chi2_sf_1df(x: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    return math.erfc(math.sqrt(max(x, 0.0) / 2.0))


def correctness(predictions: Labeling, gold: Labeling, categories: Sequence[str]) -> np.ndarray:
    """One boolean per (document, category) decision, documents sorted by id."""
    out = []
    for doc_id in sorted(gold):
        g, pr = set(gold[doc_id]), set(predictions[doc_id])
        out.extend((c in g) == (c in pr) for c in categories)
    return np.array(out, dtype=bool)


def mcnemar(decisions_a: Sequence[bool], decisions_b: Sequence[bool]) -> tuple[float, float]:
    """Continuity-corrected McNemar test on paired correctness indicators."""
    a = np.asarray(decisions_a, dtype=bool)
    b = np.asarray(decisions_b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError("decision vectors differ in length")
    only_a = int(np.sum(a & ~b))
    only_b = int(np.sum(~a & b))
    if only_a + only_b == 0:
        return 0.0, 1.0
    stat = (abs(only_a - only_b) - 1) ** 2 / (only_a + only_b)
    return stat, chi2_sf_1df(stat)


def _per_doc_counts(preds: Labeling, gold: Labeling, ids: list[str],
                    categories: set[str] | None) -> tuple[np.ndarray, np.ndarray]:
    tp = np.zeros(len(ids))
    p = np.zeros(len(ids))
    for i, doc_id in enumerate(ids):
        pr = set(preds[doc_id])
        if categories is not None:
            pr &= categories
        p[i] = len(pr)
        tp[i] = len(pr & set(gold[doc_id]))
    return tp, p


def _f_from_sums(tp, p, n):
    denom = p + n
    return np.divide(2 * tp, denom, out=np.zeros_like(tp, dtype=float), where=denom > 0)


def approx_randomization(preds_a: Labeling, preds_b: Labeling, gold: Labeling,
                         shuffles: int = 9999, rng_seed: int = 0,
                         categories: Iterable[str] | None = None) -> float:
    """Stratified approximate randomization test on micro-F.

    Each shuffle swaps the two systems' label sets for each document
    independently with probability 1/2.  Returns the add-one p-value.
    """
    if shuffles < 1:
        raise ValueError("shuffles must be >= 1")
    ids = sorted(gold)
    if set(preds_a) != set(ids) or set(preds_b) != set(ids):
        raise ValueError("predictions and gold cover different documents")
    cats = set(categories) if categories is not None else None
    gold_n = sum(len(set(gold[d]) & cats) if cats is not None else len(set(gold[d])) for d in ids)
    tp_a, p_a = _per_doc_counts(preds_a, gold, ids, cats)
    tp_b, p_b = _per_doc_counts(preds_b, gold, ids, cats)

    # micro-F = 2Σtp / (Σp + Σn), equal to 2PR/(P+R) including the 0/0 case
    observed = abs(_f_from_sums(np.array([tp_a.sum()]), np.array([p_a.sum()]), gold_n)[0]
                   - _f_from_sums(np.array([tp_b.sum()]), np.array([p_b.sum()]), gold_n)[0])
    d_tp, d_p = tp_b - tp_a, p_b - p_a
    rng = np.random.default_rng(rng_seed)
    exceed = 0
    chunk = 2048
    done = 0
    while done < shuffles:
        size = min(chunk, shuffles - done)
        mask = rng.random((size, len(ids))) < 0.5
        shift_tp = mask @ d_tp
        shift_p = mask @ d_p
        fa = _f_from_sums(tp_a.sum() + shift_tp, p_a.sum() + shift_p, gold_n)
        fb = _f_from_sums(tp_b.sum() - shift_tp, p_b.sum() - shift_p, gold_n)
        exceed += int(np.sum(np.abs(fa - fb) >= observed - 1e-12))
        done += size
    return (exceed + 1) / (shuffles + 1)


# --- reports ----------------------------------------------------------------------------

def _pct(x: float) -> str:
    return f"{100 * x:.2f}"


def write_metrics_report(counts: EvalCounts, path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write("category\tTP\tFN\tTN\tFP\tP\tR\tF\n")
        for c in counts.categories:
            p, r, f = prf(counts.tp[c], counts.p[c], counts.n[c])
            fh.write(f"{c}\t{counts.tp[c]}\t{counts.fn(c)}\t{counts.tn(c)}\t{counts.fp(c)}"
                     f"\t{_pct(p)}\t{_pct(r)}\t{_pct(f)}\n")
        tp, fn, tn, fp = (sum(fn_(c) for c in counts.categories)
                          for fn_ in (lambda c: counts.tp[c], counts.fn, counts.tn, counts.fp))
        p, r, f = micro_prf(counts)
        fh.write(f"Overall\t{tp}\t{fn}\t{tn}\t{fp}\t{_pct(p)}\t{_pct(r)}\t{_pct(f)}\n")


def write_significance_report(rows: Iterable[tuple[str, str, str, float, float]], path,
                              header: str | None = None, alpha: float = 0.05) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write("systemA\tsystemB\ttest\tstatistic\tp\tsignificant@0.05\n")
        for a, b, test, stat, p in rows:
            fh.write(f"{a}\t{b}\t{test}\t{stat:.6f}\t{p:.6f}\t{'yes' if p < alpha else 'no'}\n")
