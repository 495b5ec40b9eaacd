"""Corpus ingestion: loading, normalization, word segmentation, and sampling.

Two source layouts are supported: monolingual plain text (one sentence per
line) and verse-aligned parallel text (``verse_id<TAB>text`` per line).
Everything downstream operates on :class:`WordStream` objects produced here.
"""

from __future__ import annotations

import logging
import random
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

# Sentinel seed: negative schedule seeds select deterministic prefix sampling,
# non-negative seeds select prefixes of a single seeded shuffle.
PREFIX_SEED = -1


class CorpusFormatError(ValueError):
    """Malformed corpus input. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class Document:
    """One source line: a sentence or verse in a single language."""

    lang: str
    text: str
    source_id: str

    def __post_init__(self):
        if not self.lang:
            raise ValueError("Document.lang must be non-empty")


@dataclass(frozen=True)
class WordStream:
    """Ordered sequence of words for one language.

    Every word is non-empty and contains no whitespace; this is what the
    tokenizer trainer and all corpus statistics consume.
    """

    words: tuple[str, ...]
    lang: str

    def __post_init__(self):
        for w in self.words:
            if not w or any(ch.isspace() for ch in w):
                raise ValueError(
                    f"invalid word {w!r}: words must be non-empty and whitespace-free"
                )

    @property
    def total_words(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class SampleSchedule:
    """Strictly increasing cumulative sample sizes plus a sampling seed.

    A negative seed means deterministic prefix sampling in stream order; a
    non-negative seed shuffles the stream once (seeded) and takes prefixes of
    the shuffled order. Either way the outputs are nested.
    """

    sizes: tuple[int, ...]
    seed: int = PREFIX_SEED

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("SampleSchedule.sizes must be non-empty")
        if any(n <= 0 for n in self.sizes):
            raise ValueError("SampleSchedule.sizes must all be > 0")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("SampleSchedule.sizes must be strictly increasing")


@dataclass(frozen=True)
class NormalizeConfig:
    """Normalization knobs applied ahead of word segmentation.

    Punctuation characters (Unicode category P*) act as word boundaries when
    stripped; lowercasing is off by default so counting stays case-sensitive.
    """

    strip_punctuation: bool = True
    lowercase: bool = False


def load_plaintext(path: str | Path, lang: str) -> list[Document]:
    """Load a one-sentence-per-line UTF-8 corpus.

    Returns one Document per non-blank line, in file order. Decoding failures
    are reported with their line number.
    """
    path = Path(path)
    docs = []
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CorpusFormatError(f"invalid UTF-8 ({exc.reason})", lineno) from exc
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            docs.append(Document(lang=lang, text=line, source_id=f"{path.name}:{lineno}"))
    return docs


def load_parallel(path: str | Path, lang: str) -> list[Document]:
    """Load a verse-aligned corpus with ``verse_id<TAB>text`` lines.

    The verse id becomes the Document's source_id. Non-blank lines without a
    TAB (or with an empty verse id) are malformed.
    """
    path = Path(path)
    docs = []
    with open(path, "rb") as fh:
        for lineno, raw in enumerate(fh, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CorpusFormatError(f"invalid UTF-8 ({exc.reason})", lineno) from exc
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            verse_id, sep, text = line.partition("\t")
            if not sep:
                raise CorpusFormatError("missing TAB separator", lineno)
            if not verse_id:
                raise CorpusFormatError("empty verse id", lineno)
            docs.append(Document(lang=lang, text=text, source_id=verse_id))
    return docs


def align_verses(
    a: Sequence[Document], b: Sequence[Document]
) -> tuple[list[Document], list[Document]]:
    """Intersect two parallel corpora on verse id (source_id).

    Returns equal-length lists in the verse order of `a`; verses present in
    only one side are dropped (count logged). Duplicate verse ids keep their
    first occurrence.
    """
    by_id_a: dict[str, Document] = {}
    for doc in a:
        by_id_a.setdefault(doc.source_id, doc)
    by_id_b: dict[str, Document] = {}
    for doc in b:
        by_id_b.setdefault(doc.source_id, doc)

    shared = [vid for vid in by_id_a if vid in by_id_b]
    dropped = (len(by_id_a) - len(shared)) + (len(by_id_b) - len(shared))
    if dropped:
        log.info("align_verses: dropped %d unmatched verse(s)", dropped)
    return [by_id_a[v] for v in shared], [by_id_b[v] for v in shared]


def normalize_and_split(doc: Document, cfg: NormalizeConfig = NormalizeConfig()) -> WordStream:
    """Normalize a document and segment it into words.

    Applies Unicode NFC, optionally lowercases, turns punctuation into word
    boundaries per config, and takes maximal non-whitespace runs as words.
    Idempotent: re-splitting the space-joined output reproduces it.
    """
    text = unicodedata.normalize("NFC", doc.text)
    if cfg.lowercase:
        text = text.lower()
    if cfg.strip_punctuation:
        text = "".join(
            " " if unicodedata.category(ch).startswith("P") else ch for ch in text
        )
    return WordStream(words=tuple(text.split()), lang=doc.lang)


def normalize_corpus(
    docs: Iterable[Document], cfg: NormalizeConfig = NormalizeConfig()
) -> WordStream:
    """Normalize and concatenate many documents into one word stream."""
    words: list[str] = []
    lang = ""
    for doc in docs:
        if lang and doc.lang != lang:
            raise ValueError(f"mixed languages in corpus: {lang!r} vs {doc.lang!r}")
        lang = doc.lang
        words.extend(normalize_and_split(doc, cfg).words)
    return WordStream(words=tuple(words), lang=lang or "und")


def cumulative_samples(stream: WordStream, schedule: SampleSchedule) -> list[WordStream]:
    """Draw nested, growing samples from a stream per the schedule.

    Prefix mode (negative seed) takes prefixes in stream order; shuffle mode
    shuffles once with the seed and takes prefixes of that order. Outputs are
    nested: each sample is a superset of the previous one.
    """
    if schedule.sizes[-1] > stream.total_words:
        raise ValueError(
            f"schedule size {schedule.sizes[-1]} exceeds stream length {stream.total_words}"
        )
    order = list(stream.words)
    if schedule.seed >= 0:
        random.Random(schedule.seed).shuffle(order)
    return [WordStream(words=tuple(order[:n]), lang=stream.lang) for n in schedule.sizes]
