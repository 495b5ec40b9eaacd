"""Byte-pair-encoding training, encoding, and the compression-gain ledger.

The trainer greedily merges the most frequent adjacent symbol pair (corpus
count weighted by word frequency, ties broken lexicographically), halting at
the configured merge or vocabulary limit, or when no pair occurs at least
twice. The cumulative reduction in corpus symbol count after each merge is
kept as the gain ledger; it is non-decreasing by construction.

File formats written here (``merges.txt``, ``vocab.tsv``, token-id corpora)
are the boundary consumed by the language-model harness.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .corpus import WordStream

MERGES_HEADER = "#morphotok-merges v1"


class TokenizerFormatError(ValueError):
    """Malformed tokenizer file. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class MergeRule:
    left: str
    right: str
    rank: int
    pair_count_at_merge: int

    def __post_init__(self):
        if not self.left or not self.right:
            raise ValueError("merge rule sides must be non-empty")

    @property
    def token(self) -> str:
        return self.left + self.right


@dataclass(frozen=True)
class MergeTable:
    """An ordered merge-rule sequence with its alphabet, vocab, and gain ledger.

    gain_ledger[k] is the cumulative symbol-count reduction on the training
    stream after applying the first k+1 merges (zero merges reduce nothing).
    """

    rules: tuple[MergeRule, ...]
    alphabet: frozenset[str]
    vocab: frozenset[str]
    gain_ledger: tuple[int, ...]

    def prefix(self, n: int) -> "MergeTable":
        """The table restricted to its first n merge rules."""
        if not 0 <= n <= len(self.rules):
            raise ValueError(f"prefix length {n} out of range 0..{len(self.rules)}")
        rules = self.rules[:n]
        return MergeTable(
            rules=rules,
            alphabet=self.alphabet,
            vocab=frozenset(self.alphabet) | {r.token for r in rules},
            gain_ledger=self.gain_ledger[:n],
        )

    def vocab_order(self) -> list[str]:
        """Canonical vocabulary order: sorted alphabet, then merged tokens by rank."""
        out = sorted(self.alphabet)
        seen = set(out)
        for rule in self.rules:
            if rule.token not in seen:
                seen.add(rule.token)
                out.append(rule.token)
        return out

    def vocab_ids(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.vocab_order())}


@dataclass(frozen=True)
class TrainerConfig:
    """Halting limits and merge-scope options for the trainer.

    At least one of merge_limit / vocab_limit must be set. With
    intra_word_only (the default) merges never cross word boundaries;
    otherwise the stream is treated as one flat symbol sequence.
    """

    merge_limit: int | None = None
    vocab_limit: int | None = None
    tie_break: str = "lexicographic"
    intra_word_only: bool = True

    def __post_init__(self):
        if self.merge_limit is None and self.vocab_limit is None:
            raise ValueError("set at least one of merge_limit / vocab_limit")
        if self.merge_limit is not None and self.merge_limit <= 0:
            raise ValueError("merge_limit must be > 0 when set")
        if self.vocab_limit is not None and self.vocab_limit <= 0:
            raise ValueError("vocab_limit must be > 0 when set")
        if self.tie_break != "lexicographic":
            raise ValueError(f"unsupported tie_break {self.tie_break!r}")


@dataclass(frozen=True)
class Encoding:
    """Token sequence produced by applying a merge table to a stream."""

    tokens: tuple[str, ...]

    @property
    def token_count(self) -> int:
        return len(self.tokens)


def _merge_one(seq: list[str], left: str, right: str) -> list[str]:
    """Replace every (left, right) adjacency left-to-right, non-overlapping."""
    out = []
    i = 0
    n = len(seq)
    while i < n:
        if i < n - 1 and seq[i] == left and seq[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


def _sequences_for(stream: WordStream, intra_word_only: bool) -> tuple[list[list[str]], list[int]]:
    """Working symbol sequences plus their frequencies.

    Intra-word mode keeps one sequence per distinct word, weighted by its
    count; flat mode concatenates the whole stream into a single sequence.
    """
    if intra_word_only:
        counts = Counter(stream.words)
        return [list(w) for w in counts], list(counts.values())
    flat: list[str] = []
    for w in stream.words:
        flat.extend(w)
    return [flat], [1]


def train(stream: WordStream, cfg: TrainerConfig) -> MergeTable:
    """Train a merge table over a word stream.

    Each step selects the adjacent pair with the highest corpus count
    (weighted by word frequency; lexicographic tie-break on (left, right)),
    requires that count to be at least 2, and records the resulting symbol
    reduction in the gain ledger.
    """
    if stream.total_words == 0:
        raise ValueError("cannot train on an empty stream")

    seqs, freqs = _sequences_for(stream, cfg.intra_word_only)
    alphabet = frozenset(ch for seq in seqs for ch in seq)

    # Incrementally maintained adjacency counts and the pair -> sequence index.
    pair_counts: dict[tuple[str, str], int] = {}
    pair_seqs: dict[tuple[str, str], set[int]] = {}
    for sid, seq in enumerate(seqs):
        f = freqs[sid]
        for pair in zip(seq, seq[1:]):
            pair_counts[pair] = pair_counts.get(pair, 0) + f
            pair_seqs.setdefault(pair, set()).add(sid)

    rules: list[MergeRule] = []
    gains: list[int] = []
    cumulative_gain = 0
    vocab = set(alphabet)
    if cfg.merge_limit is not None:
        limit = cfg.merge_limit
    else:
        # Every merge removes at least one symbol occurrence, so the total
        # occurrence count bounds the number of possible merges.
        limit = sum(len(seq) * f for seq, f in zip(seqs, freqs))

    while len(rules) < limit:
        if cfg.vocab_limit is not None and len(vocab) >= cfg.vocab_limit:
            break

        best_pair = None
        best_count = 1  # a productive merge needs count >= 2
        for pair, count in pair_counts.items():
            if count > best_count or (count == best_count and best_pair is not None and pair < best_pair):
                best_pair, best_count = pair, count
        if best_pair is None:
            break

        left, right = best_pair
        affected = sorted(pair_seqs[best_pair])
        for sid in affected:
            seq = seqs[sid]
            f = freqs[sid]
            for pair in zip(seq, seq[1:]):
                pair_counts[pair] -= f
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
                    pair_seqs.pop(pair, None)
            new_seq = _merge_one(seq, left, right)
            cumulative_gain += (len(seq) - len(new_seq)) * f
            seqs[sid] = new_seq
            for pair in zip(new_seq, new_seq[1:]):
                pair_counts[pair] = pair_counts.get(pair, 0) + f
                pair_seqs.setdefault(pair, set()).add(sid)
        # Drop stale sequence-index entries for pairs no longer counted.
        for pair in list(pair_seqs):
            if pair not in pair_counts:
                del pair_seqs[pair]

        rules.append(
            MergeRule(left=left, right=right, rank=len(rules), pair_count_at_merge=best_count)
        )
        gains.append(cumulative_gain)
        vocab.add(left + right)

    return MergeTable(
        rules=tuple(rules),
        alphabet=alphabet,
        vocab=frozenset(vocab),
        gain_ledger=tuple(gains),
    )


class Encoder:
    """Applies a trained merge table, caching per-word segmentations.

    Rules are applied in rank order, each exhaustively left-to-right, which
    reproduces the trainer's final segmentation on the training stream.
    Unknown characters pass through as singleton tokens unless disabled.
    """

    def __init__(self, table: MergeTable, allow_unknown: bool = True, intra_word: bool = True):
        self.table = table
        self.allow_unknown = allow_unknown
        self.intra_word = intra_word
        self._cache: dict[str, tuple[str, ...]] = {}

    def _check_known(self, symbols: Iterable[str]) -> None:
        if self.allow_unknown:
            return
        for ch in symbols:
            if ch not in self.table.alphabet:
                raise ValueError(f"unknown symbol {ch!r} and pass-through is disabled")

    def _apply_rules(self, seq: list[str], text: str) -> list[str]:
        for rule in self.table.rules:
            # A rule can only fire if both sides occur inside this text.
            if len(seq) < 2 or rule.left not in text or rule.right not in text:
                continue
            seq = _merge_one(seq, rule.left, rule.right)
        return seq

    def segment(self, word: str) -> tuple[str, ...]:
        """Tokenize a single word; concatenation reproduces the word."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        self._check_known(word)
        tokens = tuple(self._apply_rules(list(word), word))
        self._cache[word] = tokens
        return tokens

    def encode_pairs(self, stream: WordStream) -> Iterator[tuple[str, tuple[str, ...]]]:
        """Yield (word, tokens) for every word occurrence in the stream."""
        for word in stream.words:
            yield word, self.segment(word)

    def encode_stream(self, stream: WordStream) -> Encoding:
        tokens: list[str] = []
        if self.intra_word:
            for word in stream.words:
                tokens.extend(self.segment(word))
        else:
            flat = "".join(stream.words)
            self._check_known(flat)
            tokens = self._apply_rules(list(flat), flat)
        return Encoding(tokens=tuple(tokens))

    def encode_ids(self, words: Sequence[str]) -> list[int]:
        """Token ids (canonical vocabulary order) for a sequence of words."""
        ids = self.table.vocab_ids()
        out: list[int] = []
        for word in words:
            for tok in self.segment(word):
                if tok not in ids:
                    raise ValueError(f"token {tok!r} not in vocabulary")
                out.append(ids[tok])
        return out


def encode(stream: WordStream, table: MergeTable, allow_unknown: bool = True) -> Encoding:
    """Encode a stream with a trained table (intra-word merge scope)."""
    return Encoder(table, allow_unknown=allow_unknown).encode_stream(stream)


def gain_curve(stream: WordStream, table: MergeTable, intra_word_only: bool = True) -> list[int]:
    """Cumulative symbol-count reduction on `stream` after each merge prefix.

    Entry k is the gain from the first k+1 rules; replaying rules one at a
    time makes every prefix available in a single pass.
    """
    seqs, freqs = _sequences_for(stream, intra_word_only)
    curve = []
    cumulative = 0
    for rule in table.rules:
        for sid, seq in enumerate(seqs):
            new_seq = _merge_one(seq, rule.left, rule.right)
            cumulative += (len(seq) - len(new_seq)) * freqs[sid]
            seqs[sid] = new_seq
        curve.append(cumulative)
    return curve


def compression_power(stream: WordStream, table: MergeTable, prefix_len: int) -> int:
    """Symbol-count reduction achieved by the first prefix_len merges.

    Zero merges give zero gain by construction; the value is non-decreasing
    in prefix_len because a merge can never increase the symbol count.
    """
    if not 0 <= prefix_len <= len(table.rules):
        raise ValueError(f"prefix_len {prefix_len} out of range 0..{len(table.rules)}")
    if prefix_len == 0:
        return 0
    return gain_curve(stream, table.prefix(prefix_len))[-1]


def check_increment_relation(stream: WordStream, table: MergeTable) -> list[tuple[int, bool]]:
    """Per-rank report of whether each merge's gain is <= the next merge's gain.

    This is a diagnostic: greedy training typically yields shrinking per-merge
    gains, so the relation frequently fails; callers get the per-rank truth
    values and can summarize however they need.
    """
    if len(table.rules) < 2:
        raise ValueError("need at least 2 merges to compare increments")
    curve = gain_curve(stream, table)
    deltas = [curve[0]] + [b - a for a, b in zip(curve, curve[1:])]
    return [(k, deltas[k] <= deltas[k + 1]) for k in range(len(deltas) - 1)]


def export_tokenizer(table: MergeTable, out_dir: str | Path) -> None:
    """Write ``merges.txt`` and ``vocab.tsv`` into a directory.

    merges.txt: header line, then one ``left right`` pair per rank.
    vocab.tsv: ``token<TAB>id`` with dense ids, sorted alphabet first, then
    merged tokens in rank order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "merges.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(MERGES_HEADER + "\n")
        for rule in table.rules:
            fh.write(f"{rule.left} {rule.right}\n")
    with open(out_dir / "vocab.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for tok, idx in table.vocab_ids().items():
            fh.write(f"{tok}\t{idx}\n")


def _read_lines(path: Path) -> list[str]:
    """All lines of a tokenizer file; blank lines are malformed except a final newline."""
    with open(path, encoding="utf-8") as fh:
        raw = fh.read()
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        if not line:
            raise TokenizerFormatError("blank line", lineno)
    return lines


def import_tokenizer(in_dir: str | Path) -> MergeTable:
    """Reconstruct a merge table from an exported tokenizer directory.

    Rules, ranks, and vocabulary ids are recovered exactly; per-merge pair
    counts and the gain ledger are training-time metadata not present in the
    files and come back empty.
    """
    in_dir = Path(in_dir)
    rules: list[MergeRule] = []
    merge_lines = _read_lines(in_dir / "merges.txt")
    if not merge_lines or merge_lines[0] != MERGES_HEADER:
        raise TokenizerFormatError(f"expected header {MERGES_HEADER!r}", 1)
    for lineno, line in enumerate(merge_lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise TokenizerFormatError(f"expected 'left right', got {line!r}", lineno)
        rules.append(
            MergeRule(left=parts[0], right=parts[1], rank=len(rules), pair_count_at_merge=0)
        )

    vocab: dict[str, int] = {}
    for lineno, line in enumerate(_read_lines(in_dir / "vocab.tsv"), start=1):
        parts = line.split("\t")
        if len(parts) != 2:
            raise TokenizerFormatError(f"expected 'token<TAB>id', got {line!r}", lineno)
        tok, raw_id = parts
        if tok in vocab:
            raise TokenizerFormatError(f"duplicate token {tok!r}", lineno)
        try:
            vocab[tok] = int(raw_id)
        except ValueError:
            raise TokenizerFormatError(f"non-integer id {raw_id!r}", lineno) from None

    # Alphabet symbols are single characters; merged tokens are always longer.
    alphabet = frozenset(t for t in vocab if len(t) == 1)
    table = MergeTable(
        rules=tuple(rules),
        alphabet=alphabet,
        vocab=frozenset(vocab),
        gain_ledger=(),
    )
    expected = table.vocab_ids()
    if expected != vocab:
        raise TokenizerFormatError("vocab.tsv ids are not the canonical dense assignment", 1)
    return table


def write_id_corpus(
    sentences: Iterable[Sequence[str]], table: MergeTable, path: str | Path
) -> int:
    """Write one line of space-separated token ids per sentence; returns line count."""
    enc = Encoder(table)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for words in sentences:
            fh.write(" ".join(str(i) for i in enc.encode_ids(words)) + "\n")
            count += 1
    return count
