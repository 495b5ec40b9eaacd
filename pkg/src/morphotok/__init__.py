"""morphotok: BPE tokenizer training and morphological-typology corpus statistics."""

from . import bpe, corpus, metrics, report, stats

__all__ = ["bpe", "corpus", "metrics", "report", "stats"]
__version__ = "0.1.0"
