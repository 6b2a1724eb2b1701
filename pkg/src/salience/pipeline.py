"""The streaming reader: ingest, remember, score and select in one pass.

Sentences are fed to the ledger as they arrive.  When a leg fills up, its
sentences are scored against the ledger as it stands at the end of the leg,
the attention level is stepped through them in order, and the leg's
selection is made.  Only the current leg's fragment slots are held at any
time; the ledger is the one structure that grows with the document.
"""

from __future__ import annotations

from array import array
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from salience.config import RunConfig
from salience.fragment import BINDER_WORDS, StopSet, common_words, dissociate
from salience.importance import AttentionState, RunningMedian, attention_update, is_spike
from salience.ingest import RawDocument, SentenceEvent, segment_sentences, strip_markup
from salience.memory import Ledger, MemoryConfig, tune_delta
from salience.summarize import SelectionPolicy, SentenceRecord, SummaryReport, select_sentences


@dataclass
class FragmentSnapshot:
    """Fragment statistics frozen after the first reading of a document."""

    tokens: int
    sentences: int
    leg_start_taus: list[int]
    partial_last_leg: bool
    distinct: dict[int, int]
    repetition: dict[int, dict[int, int]]
    first_seen_legs: dict[int, dict[int, int]]
    unigram_counts: dict[str, int]


@dataclass
class ScanResult:
    name: str
    config: RunConfig
    records: list[SentenceRecord]
    summary: SummaryReport
    delta_l: float
    delta_source: str
    plain: str
    ledger: Ledger
    snapshot: FragmentSnapshot
    stop_set: StopSet
    dissociation: dict[int, int] = field(default_factory=dict)
    first_pass_records: list[SentenceRecord] | None = None


class Reader:
    """Stateful reader for one document; call ``read`` once per pass."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.delta_source = "fixed" if config.delta_l is not None else "pending"
        delta = config.delta_l if config.delta_l is not None else config.l0
        self.ledger = Ledger(config.n_max, MemoryConfig(config.l0, delta))
        self.attention = AttentionState(0, config.max_attention)
        self.tau = 0
        self.sentences_seen = 0
        self.words_seen = 0
        self.leg_serial = -1
        self.passes_done = 0
        self.leg_start_taus: list[int] = []
        self.leg_start_slots: list[int] = []
        self.stop_set = StopSet(frozenset(), "unlearned")
        self.dissociation: Counter[int] = Counter()
        self.cutoff_counts: array | None = None

    @property
    def delta_l(self) -> float:
        return self.ledger.config.delta_l

    def read(self, sentences: Iterable[SentenceEvent]) -> list[SentenceRecord]:
        first_pass = self.passes_done == 0
        records: list[SentenceRecord] = []
        leg: list[tuple[SentenceRecord, list[int], float, tuple[str, ...]]] = []
        current = None
        for s in sentences:
            if s.leg_id != current:
                if leg:
                    records.extend(self._close_leg(leg, first_pass))
                leg = []
                current = s.leg_id
                self.leg_serial += 1
                if first_pass:
                    self.leg_start_taus.append(self.tau)
                    self.leg_start_slots.append(len(self.ledger))
            words = s.words
            mean_before = self.words_seen / self.sentences_seen if self.sentences_seen else 0.0
            slots = self.ledger.observe_sentence(words, self.tau, self.leg_serial)
            record = SentenceRecord(s.index, s.leg_id, len(words), s.text, paragraph=s.paragraph)
            leg.append((record, slots, mean_before, words))
            self.tau += len(words)
            self.sentences_seen += 1
            self.words_seen += len(words)
            if first_pass and self.stop_set.learned:
                self.dissociation.update(len(run) for run in dissociate(words, self.stop_set))
        if leg:
            records.extend(self._close_leg(leg, first_pass))
        self.passes_done += 1
        return records

    def _tune(self, leg_words: list[str]) -> None:
        delta = tune_delta(leg_words, self.config.l0)
        counts = Counter(leg_words)
        repeated = bool(counts) and max(counts.values()) >= 2
        self.delta_source = "tuned" if repeated else "fallback"
        self.ledger.config = MemoryConfig(self.config.l0, delta)

    def _binder_mask(self, words: tuple[str, ...]) -> list[bool]:
        n_max = self.config.n_max
        mask = []
        for i in range(len(words)):
            for n in range(1, min(n_max, len(words) - i) + 1):
                mask.append(n > 1 and words[i + n - 1] in BINDER_WORDS)
        return mask

    def _close_leg(self, leg, first_pass: bool) -> list[SentenceRecord]:
        cfg = self.config
        ledger = self.ledger
        if self.delta_source == "pending":
            self._tune([w for *_, words in leg for w in words])
        if first_pass and self.leg_serial == 0:
            self.stop_set = common_words(ledger.unigram_counts(), cfg.stop_size)
            if self.stop_set.learned:
                for *_, words in leg:
                    self.dissociation.update(len(run) for run in dissociate(words, self.stop_set))

        l0 = ledger.config.l0
        dl = ledger.config.delta_l
        tau_end = ledger.tau
        phi = self.words_seen / self.sentences_seen
        n0_leg = ledger.n0_leg
        beta = cfg.beta
        last, legc, nn = ledger.last, ledger.leg_count, ledger.n
        # later passes judge singletons by the first reading's whole-document counts
        count = ledger.count if self.cutoff_counts is None else self.cutoff_counts
        cache: dict[int, float] = {}

        for record, slots, _, words in leg:
            mask = self._binder_mask(words) if cfg.binder_filter else None
            score = 0.0
            for j, s in enumerate(slots):
                if mask is not None and mask[j]:
                    continue
                mu = cache.get(s)
                if mu is None:
                    if count[s] == 1:
                        mu = 0.0
                    else:
                        level = max(0.0, l0 - dl * (tau_end - last[s]))
                        mu = (nn[s] / phi) * (legc[s] / n0_leg) ** beta * ((l0 - level) / l0)
                    cache[s] = mu
                score += mu
            record.score = score

        if cfg.paragraph_rank:
            _paragraph_weighting([r for r, *_ in leg])

        median = RunningMedian()
        for record, _, mean_before, _ in leg:
            before = self.attention.level
            spike = is_spike(record.score, median.median, cfg.threshold_base)
            record.spike = spike
            record.sampled = before > 0 or spike or record.length >= mean_before
            self.attention = attention_update(self.attention, record.score, median.median, cfg.threshold_base)
            record.attention = self.attention.level
            if record.score > 0:
                median.add(record.score)
        return [r for r, *_ in leg]


def _paragraph_weighting(records: list[SentenceRecord]) -> None:
    """Scale sentence scores by their paragraph's mean score relative to the leg."""
    totals: dict[int, list[float]] = {}
    for r in records:
        totals.setdefault(r.paragraph, []).append(r.score)
    means = {p: sum(v) / len(v) for p, v in totals.items()}
    overall = sum(means.values()) / len(means)
    if overall <= 0:
        return
    for r in records:
        r.score *= means[r.paragraph] / overall


def _snapshot(reader: Reader) -> FragmentSnapshot:
    ledger = reader.ledger
    # slots are handed out in order of first appearance, so each leg owns a contiguous slot range
    bounds = reader.leg_start_slots + [len(ledger)]
    first_legs: dict[int, dict[int, int]] = {n: {} for n in range(1, ledger.n_max + 1)}
    for leg in range(len(reader.leg_start_slots)):
        chunk = ledger.n[bounds[leg]:bounds[leg + 1]]
        for n in first_legs:
            first_legs[n][leg] = chunk.count(n)
    repetition: dict[int, dict[int, int]] = {n: {} for n in range(1, ledger.n_max + 1)}
    for (n, c), k in sorted(Counter(zip(ledger.n, ledger.count)).items()):
        repetition[n][c] = k
    repetition = {n: h for n, h in repetition.items() if h}
    leg_size = reader.config.leg_size
    return FragmentSnapshot(
        tokens=reader.words_seen,
        sentences=reader.sentences_seen,
        leg_start_taus=list(reader.leg_start_taus),
        partial_last_leg=reader.sentences_seen % leg_size != 0,
        distinct={n: sum(h.values()) for n, h in repetition.items()},
        repetition=repetition,
        first_seen_legs={n: first_legs[n] for n in repetition},
        unigram_counts=ledger.unigram_counts(),
    )


def scan(doc: RawDocument | str, config: RunConfig | None = None, *, keep_first_pass: bool = False) -> ScanResult:
    """Run the full reader over one document and select its summary."""
    config = config or RunConfig()
    if isinstance(doc, str):
        doc = RawDocument.from_text(doc, config.format_hint or "plain")
    plain = strip_markup(doc, config.format_hint)
    reader = Reader(config)
    records = reader.read(segment_sentences(plain, config.leg_size))
    snapshot = _snapshot(reader)
    first = None
    if config.passes == 2:
        first = records if keep_first_pass else None
        reader.attention = AttentionState(0, config.max_attention)
        reader.cutoff_counts = array("i", reader.ledger.count)
        records = reader.read(segment_sentences(plain, config.leg_size))
    policy = SelectionPolicy(config.base_k, config.max_k, config.leg_size)
    summary = select_sentences(records, policy)
    return ScanResult(
        doc.name, config, records, summary, reader.delta_l, reader.delta_source, plain,
        reader.ledger, snapshot, reader.stop_set, dict(sorted(reader.dissociation.items())), first,
    )


def summarize_text(text: str, config: RunConfig | None = None) -> SummaryReport:
    return scan(text, config).summary

