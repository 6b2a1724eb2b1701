"""Decaying per-fragment memory.

Every fragment carries a learning level that is reset to ``l0`` when the
fragment is seen and otherwise loses ``delta_l`` per word of stream.  The
decay is linear, so the level at any later time has a closed form and no
per-word sweep over the ledger is needed.

Two representations live here.  ``LedgerEntry`` plus the free functions
``decay_and_read``, ``refresh`` and ``surprise`` is the straightforward
object-per-fragment model.  ``Ledger`` stores the same state in flat integer
columns keyed by a word trie, which is what keeps a full novel's worth of
six-word phrases inside a modest memory budget.
"""

from __future__ import annotations

from array import array
import heapq
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from salience.config import ConfigError

DEFAULT_L0 = 100.0


@dataclass(frozen=True)
class MemoryConfig:
    l0: float = DEFAULT_L0
    delta_l: float = 1.0
    auto_tune: bool = False

    def __post_init__(self) -> None:
        if not self.l0 > 0:
            raise ConfigError("l0 must be > 0")
        if not 0 < self.delta_l <= self.l0:
            raise ConfigError("delta_l must satisfy 0 < delta_l <= l0")

    @property
    def xi(self) -> float:
        """Words it takes a refreshed fragment to decay to zero."""
        return self.l0 / self.delta_l


@dataclass(slots=True)
class LedgerEntry:
    key: str
    n: int
    count: int
    leg_count: int
    level: float
    last_refresh_tau: int
    first_seen_tau: int


def new_entry(key: str, tau: int, config: MemoryConfig) -> LedgerEntry:
    return LedgerEntry(key, key.count(" ") + 1, 1, 1, config.l0, tau, tau)


def decay_and_read(entry: LedgerEntry, current_tau: int, config: MemoryConfig) -> float:
    if current_tau < entry.last_refresh_tau:
        raise ValueError("cannot read a level before the last refresh")
    return max(0.0, config.l0 - config.delta_l * (current_tau - entry.last_refresh_tau))


def refresh(entry: LedgerEntry, tau: int, config: MemoryConfig) -> LedgerEntry:
    entry.level = config.l0
    entry.last_refresh_tau = tau
    entry.count += 1
    entry.leg_count += 1
    return entry


def surprise(entry: LedgerEntry | None, current_tau: int, config: MemoryConfig) -> float:
    if entry is None:
        return 1.0
    return (config.l0 - decay_and_read(entry, current_tau, config)) / config.l0


def level_trace(words: Sequence[str], target: str, config: MemoryConfig) -> list[float]:
    """Level of ``target`` after each word, stepping the decay one word at a time."""
    levels = []
    level = 0.0
    for w in words:
        level = config.l0 if w == target else max(0.0, level - config.delta_l)
        levels.append(level)
    return levels


def tune_delta(window: Sequence[str], l0: float = DEFAULT_L0) -> float:
    """Pick the decay so the window's most frequent word is never forgotten.

    The decay is ``l0`` over the mean gap between successive occurrences of
    the top word.  If no word repeats, fall back to ``l0`` over the window
    length.
    """
    if not window:
        return l0
    counts = Counter(window)
    top, top_count = min(counts.items(), key=lambda wc: (-wc[1], wc[0]))
    if top_count < 2:
        return l0 / len(window)
    positions = [i for i, w in enumerate(window) if w == top]
    mean_gap = (positions[-1] - positions[0]) / (len(positions) - 1)
    return l0 / mean_gap


# ---------------------------------------------------------------- compact ledger

_SHIFT = 1 << 32  # word ids stay below this


class Ledger:
    """Column store of fragment state with trie-coded keys.

    A fragment ``w1 .. wn`` gets the key ``(slot(w1 .. wn-1) + 1) * 2**32 +
    id(wn)``, so every key is a small exact integer and extending a phrase by
    one word costs one dict probe.  Slots are assigned in order of first
    appearance.
    """

    def __init__(self, n_max: int = 6, config: MemoryConfig | None = None) -> None:
        if n_max < 1:
            raise ConfigError("n_max must be >= 1")
        self.n_max = n_max
        self.config = config or MemoryConfig()
        self.vocab: dict[str, int] = {}
        self.words: list[str] = []
        self.index: dict[int, int] = {}
        self.n = array("b")
        self.count = array("i")
        self.last = array("i")
        self.first = array("i")
        self.leg_stamp = array("i")
        self.leg_count = array("i")
        self.tau = -1
        self.leg = -1
        self.leg_occurrences = 0
        self.leg_active = 0

    def __len__(self) -> int:
        return len(self.count)

    # -- writing

    def word_ids(self, words: Sequence[str]) -> list[int]:
        vocab = self.vocab
        ids = []
        for w in words:
            i = vocab.get(w)
            if i is None:
                i = vocab[w] = len(self.words)
                self.words.append(w)
            ids.append(i)
        return ids

    def begin_leg(self, leg: int) -> None:
        if leg != self.leg:
            self.leg = leg
            self.leg_occurrences = 0
            self.leg_active = 0

    def observe_sentence(self, words: Sequence[str], start_tau: int, leg: int) -> list[int]:
        """Refresh every fragment of one sentence; return their slots in order.

        Slots come out grouped by start word, shortest fragment first, the same
        order ``extract_fragments`` produces.
        """
        self.begin_leg(leg)
        ids = self.word_ids(words)
        index, count, last, legst, legc = self.index, self.count, self.last, self.leg_stamp, self.leg_count
        get = index.get
        add_n, add_count, add_last = self.n.append, count.append, last.append
        add_first, add_stamp, add_legc = self.first.append, legst.append, legc.append
        n_max = self.n_max
        size = len(ids)
        slots: list[int] = []
        add_slot = slots.append
        active = 0
        for i in range(size):
            tau = start_tau + i
            parent = 0
            for j in range(i, min(i + n_max, size)):
                k = parent * _SHIFT + ids[j]
                s = get(k)
                if s is None:
                    s = index[k] = len(count)
                    add_n(j - i + 1)
                    add_count(1)
                    add_last(tau)
                    add_first(tau)
                    add_stamp(leg)
                    add_legc(1)
                    active += 1
                else:
                    count[s] += 1
                    last[s] = tau
                    if legst[s] != leg:
                        legst[s] = leg
                        legc[s] = 1
                        active += 1
                    else:
                        legc[s] += 1
                add_slot(s)
                parent = s + 1
        self.leg_occurrences += len(slots)
        self.leg_active += active
        if size:
            self.tau = start_tau + size - 1
        return slots

    # -- reading

    def slot(self, key: str | Sequence[str]) -> int | None:
        words = key.split(" ") if isinstance(key, str) else list(key)
        parent = 0
        s = None
        for w in words:
            wid = self.vocab.get(w)
            if wid is None:
                return None
            s = self.index.get(parent * _SHIFT + wid)
            if s is None:
                return None
            parent = s + 1
        return s

    def level_at(self, slot: int, tau: int) -> float:
        cfg = self.config
        return max(0.0, cfg.l0 - cfg.delta_l * (tau - self.last[slot]))

    def surprise_at(self, slot: int | None, tau: int) -> float:
        if slot is None:
            return 1.0
        return (self.config.l0 - self.level_at(slot, tau)) / self.config.l0

    def read_level(self, key: str, tau: int) -> float:
        """Level of ``key`` at ``tau``; an unseen fragment reads 0."""
        s = self.slot(key)
        return 0.0 if s is None else self.level_at(s, tau)

    def entry(self, key: str, at_tau: int | None = None) -> LedgerEntry | None:
        s = self.slot(key)
        if s is None:
            return None
        tau = self.tau if at_tau is None else at_tau
        return LedgerEntry(
            key, self.n[s], self.count[s], self.leg_count[s] if self.leg_stamp[s] == self.leg else 0,
            self.level_at(s, tau), self.last[s], self.first[s],
        )

    @property
    def n0_leg(self) -> float:
        """Mean per-leg count over the fragments active in the current leg."""
        if not self.leg_active:
            return 1.0
        return max(1.0, self.leg_occurrences / self.leg_active)

    def keys(self) -> list[str]:
        """Decode every slot back to its phrase, in slot order."""
        parent_of = array("i", bytes(4 * len(self)))
        word_of = array("i", bytes(4 * len(self)))
        for k, s in self.index.items():
            parent_of[s] = k // _SHIFT - 1
            word_of[s] = k % _SHIFT
        keys: list[str] = []
        for s in range(len(self)):
            p = parent_of[s]
            w = self.words[word_of[s]]
            keys.append(w if p < 0 else keys[p] + " " + w)
        return keys

    def decode(self, slots: Iterable[int]) -> dict[int, str]:
        """Phrases for a few slots without decoding the whole ledger."""
        wanted = set(slots)
        parent_of: dict[int, int] = {}
        word_of: dict[int, int] = {}
        pending = set(wanted)
        while pending:
            for k, s in self.index.items():
                if s in pending:
                    parent_of[s] = k // _SHIFT - 1
                    word_of[s] = k % _SHIFT
            missing = pending - parent_of.keys()
            if missing:
                raise KeyError(min(missing))
            pending = {parent_of[s] for s in pending if parent_of[s] >= 0} - parent_of.keys()
        out: dict[int, str] = {}

        def phrase(s: int) -> str:
            if s not in out:
                p = parent_of[s]
                w = self.words[word_of[s]]
                out[s] = w if p < 0 else phrase(p) + " " + w
            return out[s]

        return {s: phrase(s) for s in wanted}

    def top_slots(self, n: int, k: int) -> list[int]:
        """The k most repeated n-fragments, ties to the earliest first appearance."""
        return [s for _, s in heapq.nsmallest(
            k, ((-c, s) for s, (c, m) in enumerate(zip(self.count, self.n)) if m == n))]

    def counts(self) -> dict[str, int]:
        return dict(zip(self.keys(), self.count))

    def unigram_counts(self) -> dict[str, int]:
        return {self.words[k % _SHIFT]: self.count[s] for k, s in self.index.items() if k < _SHIFT}

    def repetition_histogram(self, n: int) -> dict[int, int]:
        hist: Counter[int] = Counter(c for c, m in zip(self.count, self.n) if m == n)
        return dict(sorted(hist.items()))

    def distinct(self, n: int) -> int:
        return self.n.count(n)

    def iter_first_seen(self, n: int) -> Iterator[int]:
        return (f for f, m in zip(self.first, self.n) if m == n)

    def dump(self, at_tau: int | None = None) -> list[dict]:
        tau = self.tau if at_tau is None else at_tau
        return [
            {"key": k, "n": self.n[s], "count": self.count[s], "level": self.level_at(s, tau),
             "first_seen_tau": self.first[s]}
            for s, k in enumerate(self.keys())
        ]
