"""Fragment importance, sentence scores and the attention level.

A fragment's importance multiplies three factors: its length relative to the
mean sentence length, how strongly it clusters in the current leg, and how
surprising it is to the decaying memory.  Fragments seen only once in total
score nothing.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from salience.fragment import ends_in_binder, extract_fragments
from salience.ingest import SentenceEvent
from salience.memory import Ledger, LedgerEntry, MemoryConfig, surprise

DEFAULT_THRESHOLD_BASE = 10.0
DEFAULT_MAX_ATTENTION = 3


@dataclass(frozen=True)
class ImportanceContext:
    mean_sentence_len: float
    xi: float
    n0: int = 1
    n0_leg: float = 1.0
    beta: float = 1.0
    singleton_cutoff: bool = True
    exclude_binders: bool = False


@dataclass(frozen=True)
class ImportanceRecord:
    key: str
    mu: float
    components: tuple[float, float, float]  # length ratio, cluster boost, surprise


def cluster_boost(leg_count: int, n0_leg: float, beta: float) -> float:
    return (leg_count / n0_leg) ** beta


def fragment_importance(
    entry: LedgerEntry, ctx: ImportanceContext, current_tau: int, memory: MemoryConfig
) -> ImportanceRecord:
    length_ratio = entry.n / ctx.mean_sentence_len
    boost = cluster_boost(entry.leg_count, ctx.n0_leg, ctx.beta)
    surp = surprise(entry, current_tau, memory)
    cut = (ctx.singleton_cutoff and entry.count == 1) or (ctx.exclude_binders and ends_in_binder(entry.key))
    mu = 0.0 if cut else length_ratio * boost * surp
    return ImportanceRecord(entry.key, mu, (length_ratio, boost, surp))


def sentence_score(
    sentence: SentenceEvent, ledger: Ledger, ctx: ImportanceContext, current_tau: int | None = None
) -> float:
    """Sum of importance over every fragment occurrence in the sentence.

    Reads the ledger as it stands, so call it after the sentence's fragments
    have been observed.
    """
    tau = ledger.tau if current_tau is None else current_tau
    total = 0.0
    for occ in extract_fragments(sentence, ledger.n_max):
        entry = ledger.entry(occ.key, tau)
        if entry is not None:
            total += fragment_importance(entry, ctx, tau, ledger.config).mu
    return total


@dataclass(frozen=True)
class AttentionState:
    level: int = 0
    max_level: int = DEFAULT_MAX_ATTENTION
    decay: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.level <= self.max_level:
            raise ValueError("attention level out of range")


def is_spike(score: float, baseline_median: float | None, threshold_base: float = DEFAULT_THRESHOLD_BASE) -> bool:
    return baseline_median is not None and score > 0 and score >= threshold_base * baseline_median


def attention_update(
    att: AttentionState,
    score: float,
    baseline_median: float | None,
    threshold_base: float = DEFAULT_THRESHOLD_BASE,
) -> AttentionState:
    """Rise one step on a spike, otherwise sink by the decay.

    ``baseline_median`` is the median of earlier nonzero scores in the leg;
    ``None`` (nothing to compare against yet) never counts as a spike.
    """
    if is_spike(score, baseline_median, threshold_base):
        return replace(att, level=min(att.max_level, att.level + 1))
    return replace(att, level=max(0, att.level - att.decay))


class RunningMedian:
    """Median of the values added so far; kept sorted, fine for one leg."""

    def __init__(self, values: Iterable[float] = ()) -> None:
        self._values: list[float] = sorted(values)

    def add(self, value: float) -> None:
        bisect.insort(self._values, value)

    def __len__(self) -> int:
        return len(self._values)

    @property
    def median(self) -> float | None:
        v = self._values
        if not v:
            return None
        mid = len(v) // 2
        return v[mid] if len(v) % 2 else (v[mid - 1] + v[mid]) / 2


def attention_trace(
    scores: Sequence[float],
    threshold_base: float = DEFAULT_THRESHOLD_BASE,
    max_level: int = DEFAULT_MAX_ATTENTION,
) -> list[int]:
    """Attention after each score, with the median taken over earlier nonzero scores."""
    att = AttentionState(0, max_level)
    med = RunningMedian()
    levels = []
    for score in scores:
        att = attention_update(att, score, med.median, threshold_base)
        if score > 0:
            med.add(score)
        levels.append(att.level)
    return levels
