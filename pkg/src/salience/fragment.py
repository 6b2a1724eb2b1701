"""n-phrase extraction, counting and common-word dissociation.

A fragment key is the space-joined sequence of normalized words; words never
contain whitespace, so the join is reversible and ``n`` is the number of
spaces plus one.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from salience.ingest import SentenceEvent

DEFAULT_N_MAX = 6
DEFAULT_STOP_SIZE = 20
MIN_STOP_TOKENS = 200
BINDER_WORDS = frozenset({"but", "and", "the", "or", "a", "an"})


def key_length(key: str) -> int:
    return key.count(" ") + 1


@dataclass(frozen=True, slots=True)
class FragmentOccurrence:
    key: str
    n: int
    tau: int
    sentence_index: int


@dataclass(frozen=True)
class StopSet:
    words: frozenset[str]
    source: str  # "learned", "fixed" or "unlearned"
    ranked: tuple[tuple[str, int], ...] = ()

    def __contains__(self, word: object) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    @property
    def learned(self) -> bool:
        return self.source != "unlearned"

    @classmethod
    def fixed(cls, words: Iterable[str]) -> "StopSet":
        return cls(frozenset(words), "fixed")


def ends_in_binder(key: str) -> bool:
    """True for multi-word fragments whose last word is a binder such as "and"."""
    head, _, last = key.rpartition(" ")
    return bool(head) and last in BINDER_WORDS


def extract_fragments(
    sentence: SentenceEvent, n_max: int = DEFAULT_N_MAX, *, exclude_binders: bool = False
) -> list[FragmentOccurrence]:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    words = sentence.words
    out = []
    for i in range(len(words)):
        tau = sentence.tokens[i].tau
        for n in range(1, min(n_max, len(words) - i) + 1):
            key = " ".join(words[i:i + n])
            if exclude_binders and ends_in_binder(key):
                continue
            out.append(FragmentOccurrence(key, n, tau, sentence.index))
    return out


def count_fragments(occurrences: Iterable[FragmentOccurrence]) -> Counter[str]:
    return Counter(o.key for o in occurrences)


def count_sentences(sentences: Iterable[SentenceEvent], n_max: int = DEFAULT_N_MAX) -> Counter[str]:
    counts: Counter[str] = Counter()
    for s in sentences:
        counts.update(o.key for o in extract_fragments(s, n_max))
    return counts


def repetition_histogram(counts: Mapping[str, int], n: int) -> dict[int, int]:
    """Map repetition count r to the number of distinct n-fragments seen r times."""
    hist: Counter[int] = Counter(c for k, c in counts.items() if key_length(k) == n)
    return dict(sorted(hist.items()))


def rank_words(counts: Mapping[str, int]) -> list[tuple[str, int]]:
    return sorted(((k, c) for k, c in counts.items() if " " not in k), key=lambda kc: (-kc[1], kc[0]))


def common_words(
    counts: Mapping[str, int], top: int = DEFAULT_STOP_SIZE, *, min_tokens: int = MIN_STOP_TOKENS
) -> StopSet:
    """The ``top`` most frequent single words, ties broken alphabetically.

    With fewer than ``min_tokens`` words of evidence the set comes back empty
    and marked "unlearned".
    """
    ranked = rank_words(counts)
    if sum(c for _, c in ranked) < min_tokens:
        return StopSet(frozenset(), "unlearned", tuple(ranked[:top]))
    chosen = tuple(ranked[:top])
    return StopSet(frozenset(w for w, _ in chosen), "learned", chosen)


def dissociate(sentence: SentenceEvent | Sequence[str], stop: StopSet | Iterable[str]) -> list[tuple[str, ...]]:
    """Break a sentence at stop words, returning the maximal runs between them."""
    words = sentence.words if isinstance(sentence, SentenceEvent) else tuple(sentence)
    stops = stop.words if isinstance(stop, StopSet) else frozenset(stop)
    runs: list[tuple[str, ...]] = []
    run: list[str] = []
    for w in words:
        if w in stops:
            if run:
                runs.append(tuple(run))
            run = []
        else:
            run.append(w)
    if run:
        runs.append(tuple(run))
    return runs


def dissociation_histogram(sentences: Iterable[SentenceEvent], stop: StopSet) -> dict[int, int]:
    """Number of dissociated sub-phrases of each length."""
    hist: Counter[int] = Counter()
    for s in sentences:
        hist.update(len(run) for run in dissociate(s, stop))
    return dict(sorted(hist.items()))


# ---------------------------------------------------------------- export

CSV_HEADER = ("key_or_bin", "n", "value")


def rows_to_csv(rows: Iterable[tuple[object, int, object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    return buf.getvalue()


def counts_to_csv(counts: Mapping[str, int]) -> str:
    rows = sorted(counts.items(), key=lambda kc: (key_length(kc[0]), -kc[1], kc[0]))
    return rows_to_csv((k, key_length(k), c) for k, c in rows)


def histogram_to_csv(hist: Mapping[int, int], n: int) -> str:
    return rows_to_csv((b, n, v) for b, v in sorted(hist.items()))


def counts_to_json(counts: Mapping[str, int]) -> str:
    rows = sorted(counts.items(), key=lambda kc: (key_length(kc[0]), -kc[1], kc[0]))
    return json.dumps([{"key": k, "n": key_length(k), "count": c} for k, c in rows], ensure_ascii=False)
