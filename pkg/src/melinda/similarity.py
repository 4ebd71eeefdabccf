"""Similarity metrics, value transformations and condition-tree scoring.

Every metric maps a pair of lexical values to a similarity in [0, 1].
"""

from __future__ import annotations

import math
import re
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from typing import Callable, Sequence

ValueSet = frozenset  # of str


class UnknownMetric(ValueError):
    pass


class TransformError(ValueError):
    pass


def _clamp(x: float) -> float:
    if x != x:  # NaN
        return 0.0
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def jaro(s1: str, s2: str) -> float:
    n1, n2 = len(s1), len(s2)
    if n1 == 0 and n2 == 0:
        return 1.0
    if n1 == 0 or n2 == 0:
        return 0.0
    window = max(0, max(n1, n2) // 2 - 1)

    positions: dict[str, list[int]] = defaultdict(list)
    for j, ch in enumerate(s2):
        positions[ch].append(j)
    # per character, the unmatched positions of s2 still available (sorted)
    taken2 = [False] * n2
    matched1: list[str] = []
    for i, ch in enumerate(s1):
        cands = positions.get(ch)
        if not cands:
            continue
        lo = max(0, i - window)
        k = bisect_left(cands, lo)
        while k < len(cands) and cands[k] <= i + window:
            j = cands[k]
            if not taken2[j]:
                taken2[j] = True
                matched1.append(ch)
                del cands[k]
                break
            k += 1
    m = len(matched1)
    if m == 0:
        return 0.0
    matched2 = [s2[j] for j in range(n2) if taken2[j]]
    half = sum(1 for a, b in zip(matched1, matched2) if a != b)
    t = half / 2
    return _clamp((m / n1 + m / n2 + (m - t) / m) / 3)


def edit_distance(s1: str, s2: str) -> int:
    if s1 == s2:
        return 0
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    if not s2:
        return len(s1)
    prev = list(range(len(s2) + 1))
    for i, c1 in enumerate(s1, start=1):
        cur = [i]
        for j, c2 in enumerate(s2, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (c1 != c2)))
        prev = cur
    return prev[-1]


def levenshtein_norm(s1: str, s2: str) -> float:
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return _clamp(1.0 - edit_distance(s1, s2) / longest)


_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def _number(s: str) -> float | None:
    s = s.strip()
    if not _DECIMAL.match(s):
        return None
    x = float(s)
    return x if math.isfinite(x) else None


def num_sim(a: str, b: str) -> float:
    x, y = _number(a), _number(b)
    if x is None or y is None:
        return 0.0
    if x == y:
        return 1.0
    return _clamp(1.0 - abs(x - y) / max(abs(x), abs(y)))


_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def _date(s: str) -> date | None:
    s = s.strip()
    if not _ISO_DATE.match(s):
        return None
    try:
        return date.fromisoformat(s)
    except ValueError:
        return None


def date_sim(a: str, b: str) -> float:
    x, y = _date(a), _date(b)
    if x is None or y is None:
        return 0.0
    return _clamp(1.0 - abs((x - y).days) / 365)


def jaccard(a: frozenset | set, b: frozenset | set) -> float:
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


PAIRWISE_METRICS: dict[str, Callable[[str, str], float]] = {
    "jaroSimilarity": jaro,
    "levenshteinSimilarity": levenshtein_norm,
    "numSimilarity": num_sim,
    "dateSimilarity": date_sim,
}
SET_METRICS: dict[str, Callable[[frozenset, frozenset], float]] = {
    "jaccardSimilarity": jaccard,
}
METRICS = frozenset(PAIRWISE_METRICS) | frozenset(SET_METRICS)


# --- transforms -----------------------------------------------------------------

LOWERCASE, CONCAT, SPLIT, REGEX_REPLACE = "lowercase", "concat", "split", "regexReplace"
TRANSFORM_KINDS = (LOWERCASE, CONCAT, SPLIT, REGEX_REPLACE)


@dataclass(frozen=True)
class TransformDecl:
    kind: str
    separator: str | None = None
    pattern: str | None = None
    replacement: str | None = None

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise TransformError(f"unknown transform {self.kind!r}")
        if self.kind in (CONCAT, SPLIT) and self.separator is None:
            raise TransformError(f"{self.kind} needs a separator")
        if self.kind == SPLIT and self.separator == "":
            raise TransformError("split separator must be non-empty")
        if self.kind == REGEX_REPLACE:
            if self.pattern is None or self.replacement is None:
                raise TransformError("regexReplace needs a pattern and a replacement")
            compile_pattern(self.pattern)


def compile_pattern(pattern: str) -> re.Pattern:
    try:
        return re.compile(pattern)
    except re.error as exc:
        raise TransformError(f"invalid regular expression {pattern!r}: {exc}") from None


def _python_replacement(replacement: str) -> str:
    # `$n` group references; a literal backslash must survive re's template syntax
    escaped = replacement.replace("\\", "\\\\")
    return re.sub(r"\$(?:\{(\d+)\}|(\d+))", lambda m: r"\g<" + (m.group(1) or m.group(2)) + ">", escaped)


def apply_transforms(vs: frozenset[str] | set[str], ts: Sequence[TransformDecl]) -> frozenset[str]:
    values = frozenset(vs)
    for t in ts:
        if t.kind == LOWERCASE:
            values = frozenset(v.lower() for v in values)
        elif t.kind == REGEX_REPLACE:
            rx, repl = compile_pattern(t.pattern), _python_replacement(t.replacement)
            values = frozenset(rx.sub(repl, v) for v in values)
        elif t.kind == CONCAT:
            values = frozenset([t.separator.join(sorted(values))]) if values else frozenset()
        elif t.kind == SPLIT:
            values = frozenset(piece for v in values for piece in v.split(t.separator) if piece)
    return values


# --- condition trees --------------------------------------------------------------

COMBINERS = ("AVG", "MIN", "MAX")


def compare_values(metric: str, left: frozenset[str], right: frozenset[str]) -> float:
    """Score of one compare leaf: best pair of the cross product, 0 when a side is empty."""
    if not left or not right:
        return 0.0
    if metric in SET_METRICS:
        return _clamp(SET_METRICS[metric](left, right))
    fn = PAIRWISE_METRICS.get(metric)
    if fn is None:
        raise UnknownMetric(metric)
    best = 0.0
    for a in left:
        for b in right:
            s = fn(a, b)
            if s > best:
                best = s
                if best >= 1.0:
                    return 1.0
    return best


def combine(combiner: str, scores: Sequence[float]) -> float:
    if not scores:
        raise ValueError("aggregate without children")
    if combiner == "AVG":
        return _clamp(math.fsum(scores) / len(scores))
    if combiner == "MIN":
        return min(scores)
    if combiner == "MAX":
        return max(scores)
    raise ValueError(f"unknown combiner {combiner!r}")


def check_metric(name: str) -> None:
    if name not in METRICS:
        raise UnknownMetric(name)


def _leaves(c) -> list:
    if hasattr(c, "metric"):
        return [c]
    return [leaf for ch in c.children for leaf in _leaves(ch)]


def score_condition(condition, left_values: Sequence[frozenset[str]], right_values: Sequence[frozenset[str]]) -> float:
    """Score a resolved condition tree.

    ``left_values[i]`` / ``right_values[i]`` hold the raw values of the i-th
    compare leaf in depth-first order; each leaf's transforms are applied here.
    """
    leaves = _leaves(condition)
    if len(leaves) != len(left_values) or len(leaves) != len(right_values):
        raise ValueError(f"condition has {len(leaves)} compare leaves, got values for {len(left_values)}")
    scores = []
    for leaf, lv, rv in zip(leaves, left_values, right_values):
        check_metric(leaf.metric)
        left = apply_transforms(lv, leaf.left.transforms)
        right = apply_transforms(rv, leaf.right.transforms)
        scores.append(compare_values(leaf.metric, left, right))
    return _score_tree(condition, iter(scores))


def _score_tree(c, scores) -> float:
    if hasattr(c, "metric"):
        return next(scores)
    return combine(c.combiner, [_score_tree(ch, scores) for ch in c.children])
