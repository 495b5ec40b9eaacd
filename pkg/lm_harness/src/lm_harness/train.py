"""Training loop, run logs, and curve export for the matched small LMs.

Each configured run is an independent seeded repetition over the same token
stream; two invocations with the same config produce identical logs. Loss is
mean next-token negative log-likelihood in nats, so perplexity is exactly
exp(loss) at every logged row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import torch

from .data import eval_batches, load_id_stream, load_vocab_size, sample_batch
from .model import TransformerLM


@dataclass(frozen=True)
class LMConfig:
    """Architecture and optimization settings.

    The architecture defaults (4 layers, 4 heads, 256-dim embeddings, 0.2
    dropout, AdamW at lr 1e-4 with betas 0.9/0.98) are the reference setup;
    context_len, batch_size, steps, and eval cadence are desk-scale knobs.
    """

    steps: int
    layers: int = 4
    heads: int = 4
    embed_dim: int = 256
    dropout: float = 0.2
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.98
    weight_decay: float = 0.01
    context_len: int = 128
    batch_size: int = 32
    seed: int = 0
    runs: int = 3
    eval_interval: int = 100
    eval_batches: int = 16

    def __post_init__(self):
        if self.embed_dim % self.heads != 0:
            raise ValueError("heads must divide embed_dim")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if min(self.steps, self.layers, self.context_len, self.batch_size, self.runs) <= 0:
            raise ValueError("steps, layers, context_len, batch_size, runs must be > 0")


@dataclass(frozen=True)
class LogRow:
    step: int
    loss: float
    ppl: float


@dataclass
class TrainLog:
    run_id: int
    seed: int
    train_rows: list[LogRow] = field(default_factory=list)
    val_rows: list[LogRow] = field(default_factory=list)

    @property
    def final_train_loss(self) -> float:
        return self.train_rows[-1].loss

    @property
    def final_val_loss(self) -> float:
        rows = self.val_rows or self.train_rows
        return rows[-1].loss

    @property
    def final_val_ppl(self) -> float:
        rows = self.val_rows or self.train_rows
        return rows[-1].ppl


def _row(step: int, loss: float) -> LogRow:
    return LogRow(step=step, loss=loss, ppl=math.exp(loss))


def _evaluate(model, stream, cfg) -> float:
    model.eval()
    total = 0.0
    count = 0
    with torch.no_grad():
        for x, y in eval_batches(stream, cfg.context_len, cfg.batch_size, cfg.eval_batches):
            total += model.loss(x, y).item() * y.numel()
            count += y.numel()
    model.train()
    return total / count


def _train_single(train_stream, val_stream, vocab_size, cfg, run_id) -> TrainLog:
    seed = cfg.seed + run_id
    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)

    model = TransformerLM(
        vocab_size=vocab_size,
        layers=cfg.layers,
        heads=cfg.heads,
        embed_dim=cfg.embed_dim,
        context_len=cfg.context_len,
        dropout=cfg.dropout,
    )
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2), weight_decay=cfg.weight_decay
    )
    model.train()

    log = TrainLog(run_id=run_id, seed=seed)
    for step in range(1, cfg.steps + 1):
        x, y = sample_batch(train_stream, cfg.context_len, cfg.batch_size, generator)
        loss = model.loss(x, y)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        log.train_rows.append(_row(step, loss.item()))
        if val_stream is not None and (step % cfg.eval_interval == 0 or step == cfg.steps):
            log.val_rows.append(_row(step, _evaluate(model, val_stream, cfg)))
    return log


def train_lm(
    token_corpus: str | Path,
    vocab: str | Path,
    cfg: LMConfig,
    val_corpus: str | Path | None = None,
) -> list[TrainLog]:
    """Train cfg.runs independent seeded models on an exported id corpus.

    Run r uses seed cfg.seed + r. The corpus must hold at least
    context_len + 1 tokens and only ids within the vocabulary.
    """
    vocab_size = load_vocab_size(vocab)
    train_stream = load_id_stream(token_corpus, vocab_size)
    if train_stream.shape[0] < cfg.context_len + 1:
        raise ValueError(
            f"corpus has {train_stream.shape[0]} tokens; need at least {cfg.context_len + 1}"
        )
    val_stream = None
    if val_corpus is not None:
        val_stream = load_id_stream(val_corpus, vocab_size)
        if val_stream.shape[0] < cfg.context_len + 1:
            raise ValueError("validation corpus shorter than one context window")
    return [
        _train_single(train_stream, val_stream, vocab_size, cfg, run_id)
        for run_id in range(cfg.runs)
    ]


def export_curves(log: TrainLog, path: str | Path) -> None:
    """Write one run's loss/perplexity trajectory as CSV.

    Columns: step,split,loss,ppl with train rows first at each step. Values
    carry 10 significant digits so ppl == exp(loss) survives a round trip.
    """
    rows = [(r.step, "train", r) for r in log.train_rows]
    rows += [(r.step, "val", r) for r in log.val_rows]
    rows.sort(key=lambda item: (item[0], item[1]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("step,split,loss,ppl\n")
        for step, split, row in rows:
            fh.write(f"{step},{split},{row.loss:.10g},{row.ppl:.10g}\n")


def smoothed(values: list[float], window: int = 50) -> list[float]:
    """Trailing moving average used for the loss-descent diagnostics."""
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out
