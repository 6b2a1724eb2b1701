"""Turn raw document bytes into tokens, sentence events, legs and paragraphs.

Everything here is deliberately crude: whitespace tokenization, lowercase
folding, and sentence breaks at ``.``, ``?`` and ``!``.  No abbreviation
lists, no language models.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from salience.config import ConfigError

FORMATS = ("plain", "html", "latex")
TERMINATORS = ".?!"
END_OF_STREAM = "eos"
DEFAULT_LEG_SIZE = 200


@dataclass(frozen=True)
class RawDocument:
    data: bytes
    format_hint: str = "plain"
    name: str = "<memory>"

    def __post_init__(self) -> None:
        if self.format_hint not in FORMATS:
            raise ConfigError(f"unknown format hint {self.format_hint!r}; expected one of {FORMATS}")

    @property
    def text(self) -> str:
        return self.data.decode("utf-8", errors="replace")

    @classmethod
    def from_text(cls, text: str, format_hint: str = "plain", name: str = "<memory>") -> "RawDocument":
        return cls(text.encode("utf-8"), format_hint, name)


class Token(NamedTuple):
    text: str
    tau: int


@dataclass(frozen=True)
class SentenceEvent:
    """One sentence: its tokens, ordinal, terminator and leg.

    ``text`` keeps the original whitespace-separated pieces joined by single
    spaces, so the sentence can be quoted verbatim in a summary.
    """

    tokens: tuple[Token, ...]
    index: int
    terminator: str
    leg_id: int
    text: str = ""
    paragraph: int = 0

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    @property
    def start_tau(self) -> int:
        return self.tokens[0].tau

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Leg:
    leg_id: int
    sentence_range: tuple[int, int]
    word_count: int

    @property
    def sentence_count(self) -> int:
        return self.sentence_range[1] - self.sentence_range[0] + 1


@dataclass(frozen=True)
class ParagraphSpan:
    index: int
    sentence_count: int
    word_count: int


def format_from_path(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".html", ".htm"):
        return "html"
    if suffix == ".tex":
        return "latex"
    return "plain"


def read_document(path: str | Path, format_hint: str | None = None) -> RawDocument:
    path = Path(path)
    return RawDocument(path.read_bytes(), format_hint or format_from_path(path), str(path))


# ---------------------------------------------------------------- markup

_HTML_DROP = re.compile(r"<(script|style)\b[^>]*>.*?</\1\s*>|<!--.*?-->", re.I | re.S)
_HTML_BLOCK = re.compile(
    r"</?(?:p|div|br|hr|li|ul|ol|dl|dt|dd|h[1-6]|tr|td|th|table|blockquote|pre|"
    r"section|article|header|footer|nav|aside|main|title|head|body|html|figure|figcaption)\b[^>]*>",
    re.I,
)
_HTML_TAG = re.compile(r"<[A-Za-z/!?][^<>]*>")

# escaped specials are parked in the private-use area while the rest is cleaned
_TEX_ESCAPES = {"\\%": "\ue000", "\\$": "\ue001", "\\&": "\ue002", "\\#": "\ue003",
                "\\_": "\ue004", "\\{": "\ue005", "\\}": "\ue006"}
_TEX_RESTORE = {v: k[1] for k, v in _TEX_ESCAPES.items()}
_TEX_MATH_ENV = re.compile(
    r"\\begin\{(equation|eqnarray|align|gather|multline|displaymath|math)(\*?)\}.*?\\end\{\1\2\}", re.S
)
# inline math opens on a non-space, non-digit and closes before a non-digit, so
# currency amounts ("$5 and $6") are not taken for math
_TEX_MATH = re.compile(r"\$\$.*?\$\$|\$(?![\s\d$])[^$]*?(?<!\s)\$(?!\d)|\\\[.*?\\\]|\\\(.*?\\\)", re.S)
_TEX_COMMAND = re.compile(r"\\(?:[A-Za-z@]+\*?|.)")


def _skip_group(s: str, i: int, open_ch: str, close_ch: str) -> int:
    """Index just past the balanced group starting at s[i], or i if unbalanced."""
    depth = 0
    for j in range(i, len(s)):
        if s[j] == open_ch:
            depth += 1
        elif s[j] == close_ch:
            depth -= 1
            if depth == 0:
                return j + 1
    return i


def _strip_commands_with_args(line: str) -> str:
    """Remove every command together with its bracket and brace arguments."""
    out = []
    i = 0
    while i < len(line):
        m = _TEX_COMMAND.match(line, i)
        if not m:
            out.append(line[i])
            i += 1
            continue
        i = m.end()
        while i < len(line) and line[i] in "[{":
            close = "]" if line[i] == "[" else "}"
            j = _skip_group(line, i, line[i], close)
            if j == i:
                break
            i = j
    return "".join(out)


def _unwrap_commands(line: str) -> str:
    line = line.replace("\\\\", " ")
    line = re.sub(r"\\[A-Za-z@]+\*?(?:\[[^\[\]]*\])*", "", line)
    line = line.replace("~", " ")
    return line.replace("{", "").replace("}", "")


def _latex_pass(text: str) -> str:
    for esc, mark in _TEX_ESCAPES.items():
        text = text.replace(esc, mark)
    text = _TEX_MATH_ENV.sub("", text)
    text = _TEX_MATH.sub("", text)
    lines = []
    for line in text.split("\n"):
        stripped = line.lstrip()
        if stripped.startswith("%"):
            continue
        if stripped.startswith("\\") and not _strip_commands_with_args(stripped).strip():
            continue
        lines.append(_unwrap_commands(line))
    text = "\n".join(lines)
    for mark, ch in _TEX_RESTORE.items():
        text = text.replace(mark, ch)
    return text


def _html_pass(text: str) -> str:
    text = _HTML_DROP.sub("", text)
    text = _HTML_BLOCK.sub("\n", text)
    text = _HTML_TAG.sub("", text)
    text = html.unescape(text)
    return text.strip()


def strip_markup(doc: RawDocument | str, format_hint: str | None = None) -> str:
    """Crudely remove HTML or LaTeX markup, leaving blank-line structure alone.

    Each mode is applied until the text stops changing, which makes the
    function idempotent: decoded entities or restored escapes can look like
    markup again, and a second call must not find anything left to strip.
    """
    if isinstance(doc, RawDocument):
        text, mode = doc.text, format_hint or doc.format_hint
    else:
        text, mode = doc, format_hint or "plain"
    if mode == "plain":
        return text
    if mode not in ("html", "latex"):
        raise ConfigError(f"unknown format hint {mode!r}")
    step = _html_pass if mode == "html" else _latex_pass
    for _ in range(64):
        new = step(text)
        if new == text:
            break
        text = new
    return text


# ---------------------------------------------------------------- tokens


class MarkedPiece(NamedTuple):
    """A whitespace-delimited piece of the source with its normalized form.

    ``word`` is empty when the piece is pure punctuation.  ``terminator`` is
    the sentence terminator carried at the end of the piece, if any.
    """

    raw: str
    word: str
    terminator: str | None
    paragraph: int


def _normalize(raw: str) -> tuple[str, str | None]:
    lo, hi = 0, len(raw)
    while lo < hi and not raw[lo].isalnum():
        lo += 1
    while hi > lo and not raw[hi - 1].isalnum():
        hi -= 1
    tail = raw[hi:] if hi > lo else raw
    terminator = None
    for ch in reversed(tail):
        if ch in TERMINATORS:
            terminator = ch
            break
    return raw[lo:hi].lower(), terminator


def mark_pieces(plain: str) -> Iterator[MarkedPiece]:
    """Split on whitespace, tracking blank-line paragraph breaks."""
    paragraph = 0
    pending_break = False
    seen_text = False
    for line in plain.splitlines():
        pieces = line.split()
        if not pieces:
            pending_break = seen_text
            continue
        if pending_break:
            paragraph += 1
            pending_break = False
        seen_text = True
        for raw in pieces:
            word, terminator = _normalize(raw)
            yield MarkedPiece(raw, word, terminator, paragraph)


def tokenize(plain: str) -> list[Token]:
    words = (p.word for p in mark_pieces(plain))
    return [Token(w, tau) for tau, w in enumerate(w for w in words if w)]


def segment_sentences(
    source: str | Iterable[MarkedPiece], leg_size: int = DEFAULT_LEG_SIZE
) -> Iterator[SentenceEvent]:
    """Yield sentence events, numbering tau and assigning legs as it goes."""
    _check_leg_size(leg_size)
    pieces = mark_pieces(source) if isinstance(source, str) else source
    tau = 0
    index = 0
    tokens: list[Token] = []
    raws: list[str] = []
    paragraph = 0
    for piece in pieces:
        if not tokens and not raws:
            paragraph = piece.paragraph
        raws.append(piece.raw)
        if piece.word:
            tokens.append(Token(piece.word, tau))
            tau += 1
        if piece.terminator is not None:
            if tokens:
                yield SentenceEvent(tuple(tokens), index, piece.terminator, index // leg_size,
                                    " ".join(raws), paragraph)
                index += 1
            tokens = []
            raws = []
    if tokens:
        yield SentenceEvent(tuple(tokens), index, END_OF_STREAM, index // leg_size, " ".join(raws), paragraph)


def _check_leg_size(leg_size: int) -> None:
    if not isinstance(leg_size, int) or leg_size < 1:
        raise ConfigError(f"leg size must be a positive integer, got {leg_size!r}")


def chunk_legs(sentences: Iterable[SentenceEvent], leg_size: int = DEFAULT_LEG_SIZE) -> Iterator[Leg]:
    _check_leg_size(leg_size)
    current = -1
    first = last = words = 0
    for s in sentences:
        leg_id = s.index // leg_size
        if leg_id != current:
            if current >= 0:
                yield Leg(current, (first, last), words)
            current, first, words = leg_id, s.index, 0
        last = s.index
        words += len(s.tokens)
    if current >= 0:
        yield Leg(current, (first, last), words)


def split_paragraphs(plain: str) -> list[str]:
    blocks = re.split(r"\n[ \t\r\f\v]*\n", plain)
    return [b for b in blocks if b.split()]


def detect_paragraphs(plain: str) -> list[ParagraphSpan]:
    spans = []
    for i, block in enumerate(split_paragraphs(plain)):
        sentences = list(segment_sentences(block))
        spans.append(ParagraphSpan(i, len(sentences), sum(len(s) for s in sentences)))
    return spans


def sentences_from_document(doc: RawDocument, leg_size: int = DEFAULT_LEG_SIZE) -> list[SentenceEvent]:
    return list(segment_sentences(strip_markup(doc), leg_size))


@dataclass
class Document:
    """A fully ingested document: plain text plus its sentence events."""

    name: str
    plain: str
    sentences: list[SentenceEvent] = field(default_factory=list)

    @classmethod
    def from_raw(cls, doc: RawDocument, leg_size: int = DEFAULT_LEG_SIZE) -> "Document":
        plain = strip_markup(doc)
        return cls(doc.name, plain, list(segment_sentences(plain, leg_size)))

    @property
    def word_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    def legs(self, leg_size: int = DEFAULT_LEG_SIZE) -> list[Leg]:
        return list(chunk_legs(self.sentences, leg_size))


def sentence_words(sentences: Sequence[SentenceEvent]) -> list[tuple[str, ...]]:
    return [s.words for s in sentences]
