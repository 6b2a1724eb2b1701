"""Semantics-free salience scanning for narrative text streams."""

from salience.config import ConfigError, RunConfig
from salience.ingest import RawDocument, read_document, segment_sentences, strip_markup, tokenize
from salience.pipeline import ScanResult, scan
from salience.summarize import SummaryReport, compare_summaries

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "RunConfig", "RawDocument", "read_document", "segment_sentences", "strip_markup",
    "tokenize", "ScanResult", "scan", "SummaryReport", "compare_summaries",
]
