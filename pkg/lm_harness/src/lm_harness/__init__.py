"""lm_harness: matched small transformer LMs over exported token-id corpora."""

from .data import CorpusError, load_id_stream, load_vocab_size
from .model import TransformerLM
from .train import LMConfig, LogRow, TrainLog, export_curves, smoothed, train_lm

__all__ = [
    "CorpusError",
    "LMConfig",
    "LogRow",
    "TrainLog",
    "TransformerLM",
    "export_curves",
    "load_id_stream",
    "load_vocab_size",
    "smoothed",
    "train_lm",
]
__version__ = "0.1.0"
