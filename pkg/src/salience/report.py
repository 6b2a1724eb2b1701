"""Turn scan results into report payloads and render them as text, JSON or CSV."""

from __future__ import annotations

import csv
import io
import json
from typing import Any

from salience.fragment import rank_words
from salience.ingest import detect_paragraphs
from salience.pipeline import ScanResult
from salience.stats import (
    NoveltySeries,
    beta_step_check,
    fit_power_law,
    paragraph_length_histogram,
    sentence_length_histogram,
    series_rows,
)
from salience.summarize import contrast_check

ALL_FORMATS = ("text", "json", "csv")


def _round(x: float | None, places: int = 6) -> float | None:
    return None if x is None else round(x, places)


def novelty(result: ScanResult, n: int) -> NoveltySeries:
    snap = result.snapshot
    legs = snap.first_seen_legs.get(n, {})
    points = tuple((leg + 1, legs.get(leg, 0)) for leg in range(len(snap.leg_start_taus)))
    return NoveltySeries(points, n, snap.partial_last_leg)


# ---------------------------------------------------------------- payloads


def summary_payload(result: ScanResult) -> dict[str, Any]:
    s = result.summary
    contrast = contrast_check(result.records, result.config.seed)
    return {
        "document": result.name,
        "config": result.config.to_dict(),
        "delta_l": result.delta_l,
        "delta_source": result.delta_source,
        "selected": [
            {"index": x.index, "leg": x.leg_id, "score": _round(x.score), "text": x.text} for x in s.selected
        ],
        "sampled": s.sampled,
        "skipped": s.skipped,
        "total": s.total,
        "legs": s.legs,
        "efficiency_pct": _round(s.efficiency_pct, 1),
        "efficiency_status": "ok" if s.efficiency_pct is not None else "undefined",
        "word_efficiency_pct": _round(s.word_efficiency_pct, 1),
        "contrast": {
            "leg_top_variance": _round(contrast.leg_top_variance),
            "null_variance": _round(contrast.null_variance),
            "ratio": _round(contrast.ratio),
            "low_contrast": contrast.low_contrast,
        },
        "summary_line": s.summary_line(),
    }


def _fit_payload(fit) -> dict[str, Any]:
    return {
        "status": fit.status,
        "beta": _round(fit.beta),
        "beta_stderr": _round(fit.beta_stderr),
        "s0": _round(fit.s0),
        "r2_loglog": _round(fit.r2_loglog),
        "r2_semilog": _round(fit.r2_semilog),
        "lambda": _round(fit.lam),
        "points_used": fit.points_used,
        "excluded_nonpositive": fit.excluded_nonpositive,
    }


def stats_payload(result: ScanResult) -> dict[str, Any]:
    snap = result.snapshot
    cfg = result.config
    sent_hist = sentence_length_histogram(r.length for r in result.records)
    spans = detect_paragraphs(result.plain)
    para_hist = paragraph_length_histogram(spans)
    series = {n: novelty(result, n) for n in range(1, cfg.n_max + 1)}
    fits = {n: fit_power_law(s) for n, s in series.items()}
    step = beta_step_check(fits)
    ranked = rank_words(snap.unigram_counts)[: cfg.stop_size]
    return {
        "document": result.name,
        "config": cfg.to_dict(),
        "tokens": snap.tokens,
        "sentences": snap.sentences,
        "paragraphs": len(spans),
        "legs": len(snap.leg_start_taus),
        "mean_sentence_length": _round(snap.tokens / snap.sentences) if snap.sentences else None,
        "sentence_length_histogram": [[x, _round(f, 12)] for x, f in sent_hist.bins],
        "paragraph_length_histogram": [[x, _round(f, 12)] for x, f in para_hist.bins],
        "distinct_fragments": {str(n): c for n, c in snap.distinct.items()},
        "repetition_histograms": {str(n): [[r, c] for r, c in h.items()] for n, h in snap.repetition.items()},
        "novelty": {
            str(n): {"points": [list(p) for p in s.points], "partial_last_leg": s.partial_last}
            for n, s in series.items()
        },
        "fits": {str(n): _fit_payload(f) for n, f in fits.items()},
        "beta_step": {
            "beta0": _round(step.model.beta0) if step.model else None,
            "n0": step.model.n0 if step.model else None,
            "collapsed": step.collapsed,
            "rows": [
                {"n": r.n, "beta": _round(r.beta), "stderr": _round(r.stderr), "predicted": _round(r.predicted),
                 "consistent_with_zero": r.consistent_with_zero}
                for r in step.rows
            ],
        },
        "common_words": [[w, c] for w, c in ranked],
        "stop_set": {"source": result.stop_set.source, "words": sorted(result.stop_set.words)},
        "dissociation_histogram": [[k, v] for k, v in result.dissociation.items()],
    }


def fragments_payload(result: ScanResult, top: int) -> dict[str, Any]:
    ledger = result.ledger
    per_n = {n: ledger.top_slots(n, top) for n in range(1, result.config.n_max + 1)}
    names = ledger.decode(s for slots in per_n.values() for s in slots)
    counts = result.snapshot
    tables = {}
    for n, slots in per_n.items():
        tables[str(n)] = [{"key": names[s], "count": ledger.count[s]} for s in slots]
    return {
        "document": result.name,
        "config": result.config.to_dict(),
        "tokens": counts.tokens,
        "top": tables,
        "repetition_histograms": {str(n): [[r, c] for r, c in h.items()] for n, h in counts.repetition.items()},
    }


# ---------------------------------------------------------------- rendering


def to_json(payload: Any) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def config_comment(payload: dict) -> str:
    cfg = payload["config"]
    return "# config: " + " ".join(f"{k}={cfg[k]}" for k in cfg) + "\n"


def _csv(header: tuple[str, ...], rows, document: str | None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    writer.writerow(("document",) + header if document is not None else header)
    for row in rows:
        writer.writerow((document,) + tuple(row) if document is not None else row)
    return buf.getvalue()


def summary_text(payload: dict) -> str:
    lines = [f"# {payload['document']}", config_comment(payload).rstrip("\n")]
    lines += [f"[{x['index']}] {x['text']}" for x in payload["selected"]]
    if payload["contrast"]["low_contrast"]:
        lines.append("# low-contrast selection")
    lines.append(payload["summary_line"])
    return "\n".join(lines) + "\n"


def summary_csv(result: ScanResult, multi: bool = False) -> str:
    rows = [(r.index, _round(r.score), r.attention, int(r.sampled)) for r in result.records]
    header = ("sentence_index", "score", "attention_level", "sampled")
    return _csv(header, rows, result.name if multi else None)


def stats_text(payload: dict) -> str:
    lines = [f"# {payload['document']}", config_comment(payload).rstrip("\n")]
    lines.append(f"tokens {payload['tokens']}  sentences {payload['sentences']}  "
                 f"paragraphs {payload['paragraphs']}  legs {payload['legs']}  "
                 f"mean sentence length {payload['mean_sentence_length']}")
    lines.append("n  beta      stderr    r2_loglog r2_semilog status")
    for n, f in payload["fits"].items():
        if f["status"] == "ok":
            lines.append(f"{n:<2} {f['beta']:<9.4f} {f['beta_stderr']:<9.4f} {f['r2_loglog']:<9.4f} "
                         f"{f['r2_semilog']:<10.4f} ok")
        else:
            lines.append(f"{n:<2} {'-':<9} {'-':<9} {'-':<9} {'-':<10} {f['status']}")
    lines.append(f"collapse above n0=3: {payload['beta_step']['collapsed']}")
    lines.append("common words: " + ", ".join(w for w, _ in payload["common_words"]))
    return "\n".join(lines) + "\n"


def stats_csv(payload: dict, multi: bool = False) -> str:
    rows = []
    rows += series_rows("sentence_length", 0, payload["sentence_length_histogram"])
    rows += series_rows("paragraph_length", 0, payload["paragraph_length_histogram"])
    for n, h in payload["repetition_histograms"].items():
        rows += series_rows("repetition", int(n), h)
    for n, s in payload["novelty"].items():
        rows += series_rows("novelty", int(n), s["points"])
    rows += series_rows("dissociation_length", 0, payload["dissociation_histogram"])
    header = ("series", "n", "x", "y", "log10_x", "log10_y")
    return config_comment(payload) + _csv(header, rows, payload["document"] if multi else None)


def fragments_text(payload: dict) -> str:
    lines = [f"# {payload['document']}", config_comment(payload).rstrip("\n")]
    for n, table in payload["top"].items():
        lines.append(f"n={n}")
        lines += [f"  {row['count']:>7}  {row['key']}" for row in table]
    return "\n".join(lines) + "\n"


def fragments_csv(payload: dict, multi: bool = False) -> str:
    rows = [(row["key"], int(n), row["count"]) for n, table in payload["top"].items() for row in table]
    header = ("key_or_bin", "n", "value")
    return config_comment(payload) + _csv(header, rows, payload["document"] if multi else None)
