"""Slow, literal reference implementations used as test oracles.

Nothing here reuses the index, the cached statistics or the selection
helpers of the package.  Each quantity is recomputed by scanning the raw
list of extraction events every time it is needed.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter

from lexboot.corpus import NOUN_TAGS, ADJ_TAGS
from lexboot.patterns import (DETERMINERS, Target, chunk_phrases, extract_phrase_patterns,
                              extract_word_patterns)


# --- corpus events ----------------------------------------------------------------------

def corpus_events(docs, kinds=("phrase",), n=2):
    """All (target, pattern) extraction events and all target occurrences."""
    events, occurrences = [], []
    for doc in docs:
        for sent in doc.sentences:
            toks = sent.tokens
            for tok in toks:
                if tok.pos in NOUN_TAGS | ADJ_TAGS:
                    occurrences.append(Target((tok.surface.lower(),), "word"))
            spans = sent.phrases if sent.phrases is not None else chunk_phrases(sent)
            for span in spans:
                words = [t.surface.lower() for t in toks[span.start:span.end]]
                while words and words[0] in DETERMINERS:
                    words.pop(0)
                if words:
                    occurrences.append(Target(tuple(words), "phrase"))
            if "word" in kinds:
                events.extend(extract_word_patterns(sent, n))
            if "phrase" in kinds:
                events.extend(extract_phrase_patterns(sent, n))
    return events, occurrences


# --- bootstrap --------------------------------------------------------------------------

class _Oracle:
    def __init__(self, events, occurrences, seeds):
        self.events = events
        self.occ = occurrences
        self.patterns = sorted({p for _, p in events}, key=lambda p: (str(p), p))
        self.owner = {}
        self.order = {c: [] for c in seeds}
        for c in sorted(seeds):
            for s in seeds[c]:
                form = tuple(s.lower().split())
                if form in self.owner:
                    continue
                self.owner[form] = c
                self.order[c].append((" ".join(form), 0))

    def targets(self, p):
        return {t for t, q in self.events if q == p}

    def freq(self, p):
        return sum(1 for _, q in self.events if q == p)

    def F(self, p, c):
        return sum(1 for t in self.targets(p) if self.owner.get(t.form) == c)

    def rlogf(self, p, c):
        f = self.F(p, c)
        return -math.inf if f == 0 else f / len(self.targets(p)) * math.log2(f)

    def depleted(self, p):
        return all(t.form in self.owner for t in self.targets(p))

    def pool(self, c, i, th=None):
        cands = []
        for p in self.patterns:
            if self.F(p, c) == 0 or self.depleted(p):
                continue
            if th is not None and (self.freq(p) < th.min_pattern_freq
                                   or len(self.targets(p)) > th.max_pattern_distinct_targets):
                continue
            cands.append(p)
        cands.sort(key=lambda p: (-self.rlogf(p, c), str(p), p.target_kind, p.origin,
                                  p.direction))
        return cands[:20 + i]

    def patterns_of(self, w):
        return {q for t, q in self.events if t == w}

    def avglog(self, w, c):
        pats = self.patterns_of(w)
        return sum(math.log2(self.F(p, c) + 1) for p in pats) / len(pats)

    def semprob(self, w, c):
        total = 0.0
        occ = sum(1 for t in self.occ if t == w)
        for p in self.patterns_of(w):
            in_cat = sum(1 for t, q in self.events if q == p and self.owner.get(t.form) == c)
            pair = sum(1 for t, q in self.events if q == p and t == w)
            total += in_cat / self.freq(p) * pair / occ
        return total

    def commit(self, claims, i, cap):
        best = {}
        for score, c, w in claims:
            key = (-score, c, w.kind)
            if w.form not in best or key < best[w.form][0]:
                best[w.form] = (key, score, c, w)
        for c in sorted(self.order):
            mine = sorted(((-s, " ".join(w.form), w.kind, w) for _, s, cc, w in best.values()
                           if cc == c))
            for _, text, _, w in mine[:cap]:
                self.owner[w.form] = c
                self.order[c].append((text, i))


def oracle_original(events, occurrences, seeds, iterations, per_category=5):
    o = _Oracle(events, occurrences, seeds)
    cats = sorted(seeds)
    for i in range(1, iterations + 1):
        claims = []
        for c in cats:
            words = set()
            for p in o.pool(c, i):
                words |= {t for t in o.targets(p) if t.form not in o.owner}
            for w in words:
                mine = o.avglog(w, c)
                others = [o.avglog(w, d) for d in cats if d != c]
                claims.append((mine - max(others) if others else mine, c, w))
        o.commit(claims, i, per_category)
    return o.order


def oracle_modified(events, occurrences, seeds, iterations, th, cap=5):
    o = _Oracle(events, occurrences, seeds)
    cats = sorted(seeds)
    for i in range(1, iterations + 1):
        words = set()
        for c in cats:
            for p in o.pool(c, i, th):
                for t in o.targets(p):
                    occ = sum(1 for x in o.occ if x == t)
                    if t.form not in o.owner and th.min_word_freq <= occ <= th.max_word_freq:
                        words.add(t)
        claims = []
        for w in words:
            scores = {c: o.semprob(w, c) for c in cats}
            top = max(scores.values())
            c = min(c for c in cats if scores[c] == top)
            claims.append((top, c, w))
        o.commit(claims, i, cap)
    return o.order


# --- agreement --------------------------------------------------------------------------

def masi_oracle(a, b):
    a, b = set(a), set(b)
    if not a and not b:
        return 0.0
    j = len(a & b) / len(a | b)
    m = 1 if a == b else 2 / 3 if (a <= b or b <= a) else 1 / 3 if a & b else 0
    return 1 - j * m


def alpha_oracle(pairs, distance=masi_oracle):
    values = [v for pair in pairs for v in pair]
    d_o = sum(distance(a, b) for a, b in pairs) / len(pairs)
    n = len(values)
    d_e = sum(distance(values[i], values[j]) for i in range(n) for j in range(n) if i != j)
    d_e /= n * (n - 1)
    return 1 - d_o / d_e


# --- approximate randomization ----------------------------------------------------------

def micro_f(preds, gold):
    tp = sum(len(set(preds[d]) & set(gold[d])) for d in gold)
    p = sum(len(set(preds[d])) for d in gold)
    n = sum(len(set(gold[d])) for d in gold)
    prec = tp / p if p else 0.0
    rec = tp / n if n else 0.0
    return 2 * prec * rec / (prec + rec) if prec + rec else 0.0


def exact_randomization(a, b, gold):
    ids = sorted(gold)
    observed = abs(micro_f(a, gold) - micro_f(b, gold))
    hits = 0
    for mask in itertools.product((False, True), repeat=len(ids)):
        sa = {d: (b[d] if m else a[d]) for d, m in zip(ids, mask)}
        sb = {d: (a[d] if m else b[d]) for d, m in zip(ids, mask)}
        hits += abs(micro_f(sa, gold) - micro_f(sb, gold)) >= observed - 1e-12
    return hits / 2 ** len(ids)


# --- pruned sets --------------------------------------------------------------------------

def pruned_sets_oracle(labelsets, p, b):
    """Enumerate every subset of the label universe instead of decomposing sets."""
    sets = [frozenset(s) for s in labelsets]
    universe = sorted(set().union(*sets)) if sets else []
    exact = Counter(sets)
    accepted = {s for s in exact if exact[s] >= p}
    rejected = [s for s in exact if exact[s] < p]
    for size in range(b, len(universe) + 1):
        for combo in itertools.combinations(universe, size):
            t = frozenset(combo)
            if t in accepted:
                continue
            if not any(t < s for s in rejected):
                continue
            if sum(1 for s in sets if t <= s) >= p:
                accepted.add(t)
    instances = []
    for i, s in enumerate(sets):
        if s in accepted:
            instances.append((i, s))
        else:
            inside = [a for a in accepted if a < s and len(a) >= b]
            for a in sorted(inside, key=lambda x: (len(x), sorted(x))):
                if not any(a < other for other in inside):
                    instances.append((i, a))
    return accepted, instances


# --- information gain --------------------------------------------------------------------

def entropy(counts):
    total = sum(counts)
    return -sum(c / total * math.log2(c / total) for c in counts if c)


def ig_oracle(present, labels):
    m = len(labels)
    h = entropy(list(Counter(labels).values()))
    cond = 0.0
    for flag in (True, False):
        sub = [l for f, l in zip(present, labels) if bool(f) == flag]
        if sub:
            cond += len(sub) / m * entropy(list(Counter(sub).values()))
    return h - cond
