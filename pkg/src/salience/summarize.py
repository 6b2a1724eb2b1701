"""Per-leg sentence selection and compression bookkeeping."""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from salience.config import ConfigError


@dataclass(frozen=True)
class SelectionPolicy:
    base_k: int = 1
    max_k: int = 3
    leg_size: int = 200

    def __post_init__(self) -> None:
        if not 1 <= self.base_k <= self.max_k:
            raise ConfigError("need 1 <= base_k <= max_k")

    def k_for(self, mean_attention: float) -> int:
        return min(self.max_k, max(self.base_k, self.base_k + math.floor(mean_attention)))


@dataclass
class SentenceRecord:
    """Everything the selector needs to know about one sentence."""

    index: int
    leg_id: int
    length: int
    text: str
    score: float = 0.0
    attention: int = 0
    sampled: bool = True
    spike: bool = False
    paragraph: int = 0


@dataclass(frozen=True)
class Selection:
    index: int
    leg_id: int
    score: float
    text: str


@dataclass
class SummaryReport:
    selected: list[Selection] = field(default_factory=list)
    sampled: int = 0
    skipped: int = 0
    total: int = 0
    total_words: int = 0
    sampled_words: int = 0
    legs: int = 0

    @property
    def efficiency_pct(self) -> float | None:
        return efficiency(self)

    @property
    def word_efficiency_pct(self) -> float | None:
        return 100.0 * self.total_words / self.sampled_words if self.sampled_words else None

    @property
    def indices(self) -> list[int]:
        return [s.index for s in self.selected]

    def summary_line(self) -> str:
        eff = self.efficiency_pct
        shown = "undefined" if eff is None else f"{eff:.1f}%"
        return f"Sampled/Skipped = {self.sampled}/{self.skipped} of total {self.total}, efficiency = {shown}"


def efficiency(report: SummaryReport) -> float | None:
    """Total sentences over sampled sentences, in percent; None when nothing was sampled."""
    if report.sampled == 0:
        return None
    return 100.0 * report.total / report.sampled


def select_leg(records: Sequence[SentenceRecord], policy: SelectionPolicy) -> list[SentenceRecord]:
    """Pick the k best sampled sentences of one leg, in document order."""
    if not records:
        return []
    k = policy.k_for(statistics.fmean(r.attention for r in records))
    pool = [r for r in records if r.sampled] or list(records)
    positive = [r for r in pool if r.score > 0]
    if positive:
        chosen = sorted(positive, key=lambda r: (-r.score, r.index))[:k]
    else:
        chosen = [min(pool, key=lambda r: (-r.length, r.index))]
    return sorted(chosen, key=lambda r: r.index)


def select_sentences(records: Iterable[SentenceRecord], policy: SelectionPolicy) -> SummaryReport:
    report = SummaryReport()
    leg: list[SentenceRecord] = []

    def close() -> None:
        if leg:
            report.legs += 1
            report.selected.extend(Selection(r.index, r.leg_id, r.score, r.text) for r in select_leg(leg, policy))

    for r in records:
        if leg and r.leg_id != leg[-1].leg_id:
            close()
            leg = []
        leg.append(r)
        report.total += 1
        report.total_words += r.length
        if r.sampled:
            report.sampled += 1
            report.sampled_words += r.length
        else:
            report.skipped += 1
    close()
    return report


def leg_top_scores(records: Iterable[SentenceRecord]) -> list[float]:
    tops: dict[int, float] = {}
    for r in records:
        tops[r.leg_id] = max(tops.get(r.leg_id, 0.0), r.score)
    return [tops[k] for k in sorted(tops)]


def _variance(values: Sequence[float]) -> float:
    return statistics.pvariance(values) if len(values) > 1 else 0.0


@dataclass(frozen=True)
class ContrastCheck:
    """How much the best sentence of each leg stands out from a shuffled null."""

    leg_top_variance: float
    null_variance: float
    ratio: float | None
    low_contrast: bool


def contrast_check(
    records: Sequence[SentenceRecord], seed: int, *, rounds: int = 20, margin: float = 1.0
) -> ContrastCheck:
    """Compare per-leg top-score variance against random leg assignments.

    The null keeps every sentence score but deals them into legs at random
    (seeded).  A document whose leg tops vary less than ``margin`` times the
    null's shows no sign of clustering its salient material and is flagged
    as low contrast.
    """
    observed = _variance(leg_top_scores(records))
    if len(records) == 0:
        return ContrastCheck(0.0, 0.0, None, False)
    rng = random.Random(seed)
    scores = [r.score for r in records]
    legs = [r.leg_id for r in records]
    nulls = []
    for _ in range(rounds):
        rng.shuffle(scores)
        tops: dict[int, float] = {}
        for leg, score in zip(legs, scores):
            tops[leg] = max(tops.get(leg, 0.0), score)
        nulls.append(_variance(list(tops.values())))
    null = statistics.fmean(nulls)
    if null == 0:
        return ContrastCheck(observed, null, None, observed == 0)
    ratio = observed / null
    return ContrastCheck(observed, null, ratio, ratio < margin)


# ---------------------------------------------------------------- comparison

def normalize_sentence(text: str) -> tuple[str, ...]:
    words = []
    for raw in text.split():
        lo, hi = 0, len(raw)
        while lo < hi and not raw[lo].isalnum():
            lo += 1
        while hi > lo and not raw[hi - 1].isalnum():
            hi -= 1
        if hi > lo:
            words.append(raw[lo:hi].lower())
    return tuple(words)


def _token_jaccard(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


@dataclass(frozen=True)
class Overlap:
    jaccard: float
    matched: int
    count_difference: int

    @property
    def distance(self) -> float:
        return 1.0 - self.jaccard


def compare_summaries(a: SummaryReport, b: SummaryReport, *, match_threshold: float = 0.8) -> Overlap:
    """Jaccard overlap of the two selections, matching sentences by normalized text.

    Two sentences count as the same when their word sets overlap by at least
    ``match_threshold`` (Jaccard), so a stray junk word or a formatting
    difference does not split a match.  Matching is greedy one-to-one, best
    pairs first.
    """
    sa = [normalize_sentence(s.text) for s in a.selected]
    sb = [normalize_sentence(s.text) for s in b.selected]
    if not sa and not sb:
        return Overlap(1.0, 0, 0)
    pairs = []
    for i, x in enumerate(sa):
        for j, y in enumerate(sb):
            sim = 1.0 if x == y else _token_jaccard(x, y)
            if sim >= match_threshold:
                pairs.append((-sim, i, j))
    pairs.sort()
    used_a: set[int] = set()
    used_b: set[int] = set()
    for _, i, j in pairs:
        if i not in used_a and j not in used_b:
            used_a.add(i)
            used_b.add(j)
    matched = len(used_a)
    union = len(sa) + len(sb) - matched
    return Overlap(matched / union, matched, abs(len(sa) - len(sb)))
