import gzip
from functools import lru_cache
from pathlib import Path

import pytest

from salience import RunConfig, scan
from salience.ingest import RawDocument

DATA = Path(__file__).parent / "data"

OBAMA_YEARS = range(2009, 2017)
COLLECTIONS = {
    "obama": [f"{y}_barack_obama_d" for y in OBAMA_YEARS],
    "lincoln": [f"{y}_abraham_lincoln_r" for y in range(1861, 1865)],
    "roosevelt": [f"{y}_franklin_d_roosevelt_d" for y in range(1934, 1942)],
    "kennedy": [f"{y}_john_f_kennedy_d" for y in range(1961, 1964)],
}

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def corpus_text(name: str) -> str:
    """Text of a vendored corpus: 'moby', a single address stem, or a collection name."""
    if name == "moby":
        return gzip.decompress((DATA / "moby_dick.txt.gz").read_bytes()).decode("utf-8")
    if name in COLLECTIONS:
        return "\n\n".join(corpus_text(stem) for stem in COLLECTIONS[name])
    return gzip.decompress((DATA / "sotu" / f"{name}.txt.gz").read_bytes()).decode("utf-8")


def corpus_doc(name: str) -> RawDocument:
    return RawDocument.from_text(corpus_text(name), "plain", name)


@lru_cache(maxsize=None)
def scanned(name: str, passes: int = 1):
    return scan(corpus_doc(name), RunConfig(passes=passes))


# Every long-form test document: the novel, the four address collections and
# each Obama address on its own.
TEST_DOCUMENTS = ["moby", *COLLECTIONS, *(f"{y}_barack_obama_d" for y in OBAMA_YEARS)]


@pytest.fixture(scope="session")
def moby_text() -> str:
    return corpus_text("moby")


@pytest.fixture(scope="session")
def moby_scan():
    return scanned("moby")


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
        print(ACCEPTANCE_LINES[-1])

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
