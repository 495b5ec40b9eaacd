"""Subword productivity, rank-frequency curves, and repetition trends.

Productivity is the mean number of distinct words each subword appears in,
computed over an inverted subword index. Frequency curves are rank-sorted
relative token frequencies; decay dominance compares per-rank frequency
drops between two curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import bpe
from .corpus import SampleSchedule, WordStream, cumulative_samples


@dataclass(frozen=True)
class SubwordEntry:
    word_set: frozenset[str]
    occurrence_count: int


@dataclass(frozen=True)
class SubwordIndex:
    """Inverted map from subword to the distinct words containing it."""

    entries: dict[str, SubwordEntry]

    @property
    def subword_count(self) -> int:
        return len(self.entries)

    @property
    def total_occurrences(self) -> int:
        return sum(e.occurrence_count for e in self.entries.values())


@dataclass(frozen=True)
class ProductivityResult:
    lang: str
    per_round: dict[int, float]
    mean_rho: float
    std_rho: float


@dataclass(frozen=True)
class FrequencyCurve:
    """Rank-sorted relative subword frequencies (rank 1 first)."""

    lang: str
    freqs: tuple[float, ...]
    total_tokens: int


@dataclass(frozen=True)
class TrendCurve:
    lang: str
    sample_sizes: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.sample_sizes) != len(self.values):
            raise ValueError("sample_sizes and values must have equal length")


def build_index(
    pairs: Iterable[tuple[str, Sequence[str]]], min_subword_len: int = 1
) -> SubwordIndex:
    """Build the inverted subword index from (word, tokens) pairs.

    The iterable covers every word occurrence (repeats included), so
    occurrence counts are token frequencies while word sets stay distinct.
    min_subword_len=2 drops the single-character tokens that survive merging.
    """
    words: dict[str, set[str]] = {}
    counts: dict[str, int] = {}
    for word, tokens in pairs:
        for tok in tokens:
            if len(tok) < min_subword_len:
                continue
            counts[tok] = counts.get(tok, 0) + 1
            words.setdefault(tok, set()).add(word)
    entries = {
        tok: SubwordEntry(word_set=frozenset(words[tok]), occurrence_count=counts[tok])
        for tok in counts
    }
    return SubwordIndex(entries=entries)


def index_stream(
    stream: WordStream, table: bpe.MergeTable, min_subword_len: int = 1
) -> SubwordIndex:
    """Encode a stream with a table and index it, weighting by word counts."""
    enc = bpe.Encoder(table)
    words: dict[str, set[str]] = {}
    counts: dict[str, int] = {}
    word_counts: dict[str, int] = {}
    for w in stream.words:
        word_counts[w] = word_counts.get(w, 0) + 1
    for word, n in word_counts.items():
        for tok in enc.segment(word):
            if len(tok) < min_subword_len:
                continue
            counts[tok] = counts.get(tok, 0) + n
            words.setdefault(tok, set()).add(word)
    entries = {
        tok: SubwordEntry(word_set=frozenset(words[tok]), occurrence_count=counts[tok])
        for tok in counts
    }
    return SubwordIndex(entries=entries)


def productivity(index: SubwordIndex) -> float:
    """Mean number of distinct words per subword (the productivity score)."""
    if index.subword_count == 0:
        raise ValueError("empty subword index")
    return sum(len(e.word_set) for e in index.entries.values()) / index.subword_count


def sample_std(values: Sequence[float]) -> float:
    """Sample (n-1) standard deviation; 0.0 for fewer than two values."""
    n = len(values)
    if n < 2:
        return 0.0
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def productivity_rounds(
    stream: WordStream,
    merge_counts: Sequence[int] = (300, 400, 500),
    min_subword_len: int = 1,
    table: bpe.MergeTable | None = None,
) -> ProductivityResult:
    """Productivity per merge round, with mean and sample deviation.

    One table is trained at the largest requested merge count and sliced into
    prefixes for the smaller rounds (greedy training is prefix-stable). A
    pretrained table covering max(merge_counts) may be passed to skip
    training. Rounds beyond the trainer's natural halting point reuse the
    full rule list.
    """
    if not merge_counts:
        raise ValueError("merge_counts must be non-empty")
    if table is None:
        cfg = bpe.TrainerConfig(merge_limit=max(merge_counts))
        table = bpe.train(stream, cfg)
    per_round: dict[int, float] = {}
    for count in merge_counts:
        prefix = table.prefix(min(count, len(table.rules)))
        per_round[count] = productivity(index_stream(stream, prefix, min_subword_len))
    values = [per_round[c] for c in merge_counts]
    return ProductivityResult(
        lang=stream.lang,
        per_round=per_round,
        mean_rho=sum(values) / len(values),
        std_rho=sample_std(values),
    )


def _sorted_relative_freqs(index: SubwordIndex) -> list[float]:
    total = index.total_occurrences
    ordered = sorted(
        index.entries.items(), key=lambda item: (-item[1].occurrence_count, item[0])
    )
    return [entry.occurrence_count / total for _, entry in ordered]


def frequency_curve(index: SubwordIndex, top_n: int = 100, lang: str = "") -> FrequencyCurve:
    """Rank-sorted relative frequencies truncated to the top_n subwords.

    Frequencies are normalized by the total token count before truncation, so
    curves are comparable across corpora of different sizes.
    """
    if top_n < 2:
        raise ValueError("top_n must be >= 2")
    if index.subword_count < 2:
        raise ValueError("index must contain at least 2 subwords")
    freqs = _sorted_relative_freqs(index)[:top_n]
    return FrequencyCurve(lang=lang, freqs=tuple(freqs), total_tokens=index.total_occurrences)


def decay_dominance(
    a: FrequencyCurve, b: FrequencyCurve, k_max: int
) -> tuple[float, tuple[bool, ...]]:
    """How often curve `a` drops faster than curve `b` across ranks 1..k_max.

    per_k[i] is True when a's frequency drop from rank k to k+1 strictly
    exceeds b's. The fraction of True entries is returned alongside; this is
    a diagnostic summary, not an assertion.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if len(a.freqs) < k_max + 1 or len(b.freqs) < k_max + 1:
        raise ValueError(f"both curves need at least {k_max + 1} points")
    per_k = tuple(
        (a.freqs[k - 1] - a.freqs[k]) > (b.freqs[k - 1] - b.freqs[k])
        for k in range(1, k_max + 1)
    )
    return sum(per_k) / len(per_k), per_k


def top_k_mean_frequency(index: SubwordIndex, top_k: int) -> float:
    """Mean relative frequency of the top_k most frequent subwords."""
    freqs = _sorted_relative_freqs(index)[:top_k]
    return sum(freqs) / len(freqs)


def repetition_trend(
    stream: WordStream,
    schedule: SampleSchedule,
    table_cfg: bpe.TrainerConfig,
    top_k: int = 100,
) -> TrendCurve:
    """Subword repetition statistic over growing cumulative samples.

    For every sample in the schedule a fresh table is trained and the mean
    relative frequency of its top_k subwords is recorded; the resulting
    series is the per-language repetition trend.
    """
    values = []
    for sample in cumulative_samples(stream, schedule):
        table = bpe.train(sample, table_cfg)
        values.append(top_k_mean_frequency(index_stream(sample, table), top_k))
    return TrendCurve(lang=stream.lang, sample_sizes=tuple(schedule.sizes), values=tuple(values))
