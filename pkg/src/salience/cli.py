"""Command-line front end: ``salience summarize|stats|fragments|baseline``."""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from salience import report
from salience.config import ConfigError, RunConfig, load_config_file
from salience.ingest import read_document
from salience.pipeline import scan
from salience.stats import shuffle_baseline

# flag name -> RunConfig field
_FLAG_FIELDS = {
    "leg": "leg_size", "nmax": "n_max", "l0": "l0", "delta": "delta_l", "beta": "beta", "k": "base_k",
    "max_k": "max_k", "passes": "passes", "seed": "seed", "format": "output", "format_hint": "format_hint",
    "top": "top", "sentences": "baseline_sentences", "binder_filter": "binder_filter",
    "paragraph_rank": "paragraph_rank",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("paths", nargs="+", help="input files")
    common.add_argument("--config", help="key = value file; command-line flags override it")
    common.add_argument("--leg", type=int, help="sentences per leg (default 200)")
    common.add_argument("--nmax", type=int, help="longest fragment in words (default 6)")
    common.add_argument("--l0", type=float, help="memory refresh level (default 100)")
    common.add_argument("--delta", help="memory decay per word, or 'auto' to tune on the first leg")
    common.add_argument("--beta", type=float, help="clustering exponent (default 1.0)")
    common.add_argument("--k", type=int, help="sentences per leg at rest (default 1)")
    common.add_argument("--max-k", dest="max_k", type=int, help="most sentences per leg (default 3)")
    common.add_argument("--passes", type=int, choices=(1, 2), help="reading passes (default 1)")
    common.add_argument("--seed", type=int, help="seed for every random choice (default 0)")
    common.add_argument("--format", choices=report.ALL_FORMATS, help="output encoding (default text)")
    common.add_argument("--format-hint", dest="format_hint", choices=("plain", "html", "latex"),
                        help="input markup; default guessed from the file extension")
    common.add_argument("--out", help="write to this file instead of standard output")
    common.add_argument("--jobs", type=int, default=None, help="parallel documents (default: one per CPU)")

    parser = argparse.ArgumentParser(prog="salience", description="Semantics-free narrative salience scanner.")
    sub = parser.add_subparsers(dest="command", required=True)
    summ = sub.add_parser("summarize", parents=[common], help="pick salient sentences per leg")
    summ.add_argument("--binder-filter", dest="binder_filter", action="store_const", const=True,
                      help="ignore fragments that end in a binder word")
    summ.add_argument("--paragraph-rank", dest="paragraph_rank", action="store_const", const=True,
                      help="weight sentence scores by their paragraph's mean score")
    sub.add_parser("stats", parents=[common], help="length histograms, novelty fits and word lists")
    frag = sub.add_parser("fragments", parents=[common], help="most repeated fragments per length")
    frag.add_argument("--top", type=int, help="rows per fragment length (default 50)")
    base = sub.add_parser("baseline", parents=[common], help="write a shuffled-sentence baseline document")
    base.add_argument("--sentences", type=int, help="sentences to draw (default 400)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_config_file(args.config) if args.config else RunConfig()
    values = {}
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[name] = value
    return RunConfig.from_mapping(values, config)


def _run_one(task: tuple[str, str, RunConfig, bool]) -> str:
    command, path, config, multi = task
    result = scan(read_document(path, config.format_hint), config)
    fmt = config.output
    if command == "summarize":
        payload = report.summary_payload(result)
        if fmt == "json":
            return report.to_json(payload)
        if fmt == "csv":
            return report.config_comment(payload) + report.summary_csv(result, multi)
        return report.summary_text(payload)
    if command == "stats":
        payload = report.stats_payload(result)
        if fmt == "json":
            return report.to_json(payload)
        return report.stats_csv(payload, multi) if fmt == "csv" else report.stats_text(payload)
    payload = report.fragments_payload(result, config.top)
    if fmt == "json":
        return report.to_json(payload)
    return report.fragments_csv(payload, multi) if fmt == "csv" else report.fragments_text(payload)


def _check_readable(paths: Sequence[str]) -> str | None:
    for p in paths:
        try:
            with open(p, "rb"):
                pass
        except OSError as exc:
            return f"cannot read {p}: {exc.strerror or exc}"
    return None


def _join(outputs: list[str], fmt: str) -> str:
    if len(outputs) == 1:
        return outputs[0]
    if fmt == "json":
        return "[\n" + ",\n".join(o.rstrip("\n") for o in outputs) + "\n]\n"
    if fmt == "csv":
        # keep one header row
        first, *rest = outputs
        body = [first] + ["".join(o.splitlines(keepends=True)[2:]) for o in rest]
        return "".join(body)
    return "\n".join(outputs)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"salience: cannot read config {args.config}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    problem = _check_readable(args.paths)
    if problem:
        print(f"salience: {problem}", file=sys.stderr)
        return 1

    if args.command == "baseline":
        docs = [read_document(p, config.format_hint) for p in args.paths]
        try:
            doc = shuffle_baseline(docs, config.seed, config.baseline_sentences)
        except ValueError as exc:
            print(f"salience: {exc}", file=sys.stderr)
            return 1
        _emit(doc.data.decode("utf-8"), args.out)
        print(f"baseline seed {config.seed}", file=sys.stderr)
        return 0

    multi = len(args.paths) > 1
    tasks = [(args.command, p, config, multi) for p in args.paths]
    jobs = args.jobs or min(len(tasks), os.cpu_count() or 1)
    if jobs > 1 and multi:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_one, tasks))
    else:
        outputs = [_run_one(t) for t in tasks]
    _emit(_join(outputs, config.output), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
