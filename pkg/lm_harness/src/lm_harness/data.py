"""Token-id corpus and vocabulary loading.

Consumes the tokenizer export formats: ``vocab.tsv`` (``token<TAB>id`` with
dense ids) and id corpora with one line of space-separated decimal token ids
per sentence. Sentences are flattened into a single stream for training.
"""

from __future__ import annotations

from pathlib import Path

import torch


class CorpusError(ValueError):
    pass


def load_vocab_size(vocab_path: str | Path) -> int:
    """Vocabulary size from a vocab.tsv; validates dense 0..n-1 ids."""
    ids = []
    with open(vocab_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{vocab_path}:{lineno}: expected 'token<TAB>id'")
            ids.append(int(parts[1]))
    if sorted(ids) != list(range(len(ids))):
        raise CorpusError(f"{vocab_path}: ids are not dense 0..{len(ids) - 1}")
    return len(ids)


def load_id_stream(corpus_path: str | Path, vocab_size: int) -> torch.Tensor:
    """Flatten an id corpus into one long int64 tensor, checking id range."""
    ids: list[int] = []
    with open(corpus_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            for tok in line.split():
                value = int(tok)
                if not 0 <= value < vocab_size:
                    raise CorpusError(
                        f"{corpus_path}:{lineno}: id {value} outside vocab range 0..{vocab_size - 1}"
                    )
                ids.append(value)
    return torch.tensor(ids, dtype=torch.long)


def sample_batch(
    stream: torch.Tensor, context_len: int, batch_size: int, generator: torch.Generator
) -> tuple[torch.Tensor, torch.Tensor]:
    """Random context windows plus their shifted targets."""
    max_start = stream.shape[0] - context_len - 1
    starts = torch.randint(0, max_start + 1, (batch_size,), generator=generator)
    x = torch.stack([stream[s : s + context_len] for s in starts])
    y = torch.stack([stream[s + 1 : s + context_len + 1] for s in starts])
    return x, y


def eval_batches(
    stream: torch.Tensor, context_len: int, batch_size: int, max_batches: int
):
    """Deterministic non-overlapping evaluation windows."""
    windows = []
    for start in range(0, stream.shape[0] - context_len - 1, context_len):
        windows.append((stream[start : start + context_len], stream[start + 1 : start + context_len + 1]))
        if len(windows) >= max_batches * batch_size:
            break
    for i in range(0, len(windows), batch_size):
        chunk = windows[i : i + batch_size]
        yield torch.stack([c[0] for c in chunk]), torch.stack([c[1] for c in chunk])
