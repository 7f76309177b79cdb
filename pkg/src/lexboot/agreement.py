"""Two-annotator agreement on set-valued labels (MASI distance, Krippendorff's alpha)."""
from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Callable, Iterable, Sequence

__all__ = ["masi_distance", "krippendorff_alpha"]


def masi_distance(a: Iterable[str], b: Iterable[str]) -> float:
    """1 - Jaccard * monotonicity, with monotonicity 1, 2/3, 1/3 or 0."""
    a, b = frozenset(a), frozenset(b)
    if a == b:
        return 0.0
    union = a | b
    inter = a & b
    jaccard = Fraction(len(inter), len(union))
    if a <= b or b <= a:
        mono = Fraction(2, 3)
    elif inter:
        mono = Fraction(1, 3)
    else:
        mono = Fraction(0)
    return float(1 - jaccard * mono)


def krippendorff_alpha(pairs: Sequence[tuple[Iterable[str], Iterable[str]]],
                       distance: Callable[[frozenset, frozenset], float] = masi_distance) -> float:
    """Alpha = 1 - D_o / D_e for two annotators who coded every item.

    D_o averages the within-item distance; D_e averages the distance over
    all ordered pairs of the 2N pooled values.
    """
    if len(pairs) < 2:
        raise ValueError("need at least two items")
    items = [(frozenset(x), frozenset(y)) for x, y in pairs]
    d_o = sum(distance(x, y) for x, y in items) / len(items)
    values = Counter(v for item in items for v in item)
    total = 2 * len(items)
    keys = list(values)
    cross = sum(values[u] * values[v] * distance(u, v)
                for i, u in enumerate(keys) for v in keys[i + 1:])
    same = sum(values[u] * (values[u] - 1) * distance(u, u) for u in keys)
    d_e = (2 * cross + same) / (total * (total - 1))
    if d_e == 0:
        if d_o == 0:
            return 1.0
        raise ValueError("expected disagreement is zero")
    return 1.0 - d_o / d_e
