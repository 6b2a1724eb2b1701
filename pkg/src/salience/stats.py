"""Length distributions, novelty rates, scaling fits and shuffled baselines."""

from __future__ import annotations

import bisect
import csv
import io
import math
import random
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from salience.ingest import (
    DEFAULT_LEG_SIZE,
    ParagraphSpan,
    RawDocument,
    SentenceEvent,
    segment_sentences,
    strip_markup,
)

MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class HistogramSeries:
    bins: tuple[tuple[int, float], ...]
    total: int

    def as_dict(self) -> dict[int, float]:
        return dict(self.bins)


def normalized_histogram(values: Iterable[int]) -> HistogramSeries:
    counts = Counter(values)
    total = sum(counts.values())
    if not total:
        return HistogramSeries((), 0)
    return HistogramSeries(tuple((x, c / total) for x, c in sorted(counts.items())), total)


def _length(item: SentenceEvent | str | int | Sequence[str]) -> int:
    if isinstance(item, int):
        return item
    if isinstance(item, str):
        return len(item.split())
    return len(item)


def sentence_length_histogram(sentences: Iterable[SentenceEvent | str | int | Sequence[str]]) -> HistogramSeries:
    """Share of sentences at each exact word count."""
    return normalized_histogram(_length(s) for s in sentences)


def paragraph_length_histogram(spans: Iterable[ParagraphSpan | int]) -> HistogramSeries:
    return normalized_histogram(s if isinstance(s, int) else s.word_count for s in spans)


@dataclass(frozen=True)
class NoveltySeries:
    """New distinct n-fragments per leg; ``s`` counts legs from 1.

    ``partial_last`` marks a final leg holding fewer than ``leg_size``
    sentences, which the fits leave out.
    """

    points: tuple[tuple[int, int], ...]
    n: int
    partial_last: bool = False

    @property
    def total(self) -> int:
        return sum(d for _, d in self.points)

    def fit_points(self) -> tuple[tuple[int, int], ...]:
        return self.points[:-1] if self.partial_last else self.points


def novelty_series(
    stream: Iterable[SentenceEvent | Sequence[str]], n: int, leg_size: int = DEFAULT_LEG_SIZE
) -> NoveltySeries:
    """Count, per leg, the n-fragments that have never been seen before."""
    seen: set[tuple[str, ...]] = set()
    per_leg: dict[int, int] = {}
    count = 0
    for i, s in enumerate(stream):
        words = s.words if isinstance(s, SentenceEvent) else tuple(s)
        leg = i // leg_size
        new = 0
        for j in range(len(words) - n + 1):
            frag = words[j:j + n]
            if frag not in seen:
                seen.add(frag)
                new += 1
        per_leg[leg] = per_leg.get(leg, 0) + new
        count = i + 1
    if not count:
        return NoveltySeries((), n)
    legs = (count - 1) // leg_size + 1
    points = tuple((leg + 1, per_leg.get(leg, 0)) for leg in range(legs))
    return NoveltySeries(points, n, count % leg_size != 0)


def novelty_from_first_seen(
    first_seen: Iterable[int], leg_start_taus: Sequence[int], n: int, partial_last: bool
) -> NoveltySeries:
    """Same series built from the first-seen times a ledger records."""
    per_leg = Counter(bisect.bisect_right(leg_start_taus, tau) - 1 for tau in first_seen)
    points = tuple((leg + 1, per_leg.get(leg, 0)) for leg in range(len(leg_start_taus)))
    return NoveltySeries(points, n, partial_last)


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r2: float
    slope_stderr: float


def least_squares(xs: Sequence[float], ys: Sequence[float]) -> LineFit:
    m = len(xs)
    mx, my = statistics.fmean(xs), statistics.fmean(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    syy = sum((y - my) ** 2 for y in ys)
    slope = sxy / sxx if sxx else 0.0
    intercept = my - slope * mx
    ssr = sum((y - intercept - slope * x) ** 2 for x, y in zip(xs, ys))
    if syy <= 1e-12 * max(1.0, my * my):
        r2 = 1.0 if ssr <= 1e-12 * max(1.0, my * my) else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ssr / syy))
    stderr = math.sqrt(ssr / (m - 2) / sxx) if m > 2 and sxx else 0.0
    return LineFit(slope, intercept, r2, stderr)


@dataclass(frozen=True)
class PowerLawFit:
    """Power-law and exponential fits to a decaying positive series.

    ``beta`` is the negated log-log slope and ``s0`` the scale at which the
    fitted law passes through 1; ``lam`` is the negated semilog slope.
    """

    status: str
    beta: float | None = None
    s0: float | None = None
    r2_loglog: float | None = None
    r2_semilog: float | None = None
    lam: float | None = None
    beta_stderr: float | None = None
    points_used: int = 0
    excluded_nonpositive: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def power_law_preferred(self) -> bool | None:
        if not self.ok:
            return None
        return self.r2_loglog > self.r2_semilog


def fit_power_law(series: NoveltySeries | Iterable[tuple[float, float]]) -> PowerLawFit:
    points = series.fit_points() if isinstance(series, NoveltySeries) else tuple(series)
    positive = [(float(s), float(d)) for s, d in points if s > 0 and d > 0]
    excluded = len(points) - len(positive)
    if len(positive) < MIN_FIT_POINTS:
        return PowerLawFit("insufficient data", points_used=len(positive), excluded_nonpositive=excluded)
    log_s = [math.log(s) for s, _ in positive]
    log_d = [math.log(d) for _, d in positive]
    loglog = least_squares(log_s, log_d)
    semilog = least_squares([s for s, _ in positive], log_d)
    beta = -loglog.slope
    try:
        s0 = math.exp(loglog.intercept / beta) if abs(beta) > 1e-12 else None
    except OverflowError:
        s0 = None
    return PowerLawFit(
        "ok", beta, s0, loglog.r2, semilog.r2, -semilog.slope, loglog.slope_stderr, len(positive), excluded
    )


@dataclass(frozen=True)
class BetaStepModel:
    beta0: float
    n0: int = 3

    def predict(self, n: int) -> float:
        if n < self.n0:
            return self.beta0
        if n == self.n0:
            return self.beta0 / 2
        return 0.0


@dataclass(frozen=True)
class BetaStepRow:
    n: int
    beta: float | None
    stderr: float | None
    predicted: float | None
    consistent_with_zero: bool | None


@dataclass(frozen=True)
class BetaStepReport:
    model: BetaStepModel | None
    rows: tuple[BetaStepRow, ...] = field(default_factory=tuple)

    @property
    def collapsed(self) -> bool | None:
        """True when every fitted exponent above the cutoff is indistinguishable from 0."""
        if self.model is None:
            return None
        tail = [r.consistent_with_zero for r in self.rows if r.n > self.model.n0]
        if not tail or any(t is None for t in tail):
            return None
        return all(tail)


def consistent_with_zero(beta: float, stderr: float) -> bool:
    return abs(beta) < 2 * stderr or abs(beta) < 1e-12


def beta_step_check(fits: Mapping[int, PowerLawFit], n0: int = 3) -> BetaStepReport:
    first = fits.get(1)
    model = BetaStepModel(first.beta, n0) if first is not None and first.ok else None
    rows = []
    for n in sorted(fits):
        fit = fits[n]
        if not fit.ok:
            rows.append(BetaStepRow(n, None, None, model.predict(n) if model else None, None))
            continue
        rows.append(BetaStepRow(
            n, fit.beta, fit.beta_stderr, model.predict(n) if model else None,
            consistent_with_zero(fit.beta, fit.beta_stderr),
        ))
    return BetaStepReport(model, tuple(rows))


def _with_terminator(text: str) -> str:
    return text if text[-1] in ".?!" else text + "."


def pooled_sentences(corpus: Sequence[RawDocument | str]) -> list[str]:
    pool = []
    for doc in corpus:
        plain = strip_markup(doc) if isinstance(doc, RawDocument) else doc
        pool.extend(_with_terminator(s.text) for s in segment_sentences(plain))
    return pool


def shuffle_baseline(
    corpus: Sequence[RawDocument | str], seed: int, sentences: int = 400, *, name: str | None = None
) -> RawDocument:
    """A document of sentences drawn at random, without replacement, from a pooled corpus."""
    if not corpus:
        raise ValueError("empty corpus")
    if len(corpus) < 2:
        raise ValueError("a baseline needs at least two source documents")
    pool = pooled_sentences(corpus)
    if not pool:
        raise ValueError("empty corpus: no sentences in any source document")
    chosen = random.Random(seed).sample(pool, min(sentences, len(pool)))
    text = " ".join(chosen) + "\n"
    return RawDocument(text.encode("utf-8"), "plain", name or f"baseline-{seed}")


# ---------------------------------------------------------------- export

SERIES_HEADER = ("series", "n", "x", "y", "log10_x", "log10_y")


def _log10(v: float) -> float | str:
    return math.log10(v) if v > 0 else ""


def series_rows(name: str, n: int, points: Iterable[tuple[float, float]]) -> list[tuple]:
    """Rows carrying the linear values plus their base-10 logs (blank when undefined)."""
    return [(name, n, x, y, _log10(x), _log10(y)) for x, y in points]


def series_to_csv(rows: Iterable[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    writer.writerow(SERIES_HEADER)
    writer.writerows(rows)
    return buf.getvalue()
