import shutil
import subprocess
from pathlib import Path

import pytest

from lm_harness import LMConfig, train_lm

MORPHOTOK = shutil.which("morphotok")


def write_tiny_corpus(tmp_path: Path, tokens=50, vocab=17):
    """A fixed tiny id corpus plus matching vocab file."""
    tmp_path.mkdir(parents=True, exist_ok=True)
    ids = tmp_path / "tiny.ids"
    ids.write_text(" ".join(str(i % vocab) for i in range(tokens)) + "\n")
    vocab_path = tmp_path / "vocab.tsv"
    vocab_path.write_text("".join(f"t{i}\t{i}\n" for i in range(vocab)))
    return ids, vocab_path


def prepare_language(workdir: Path, name: str, kind: str, seed: int, words: int = 6000):
    """Build one language's train/val id corpora through the tokenizer CLI.

    Generates `words` words, splits the text two-thirds/one-third, trains a
    300-merge tokenizer on the training split, and encodes both splits to
    token ids. Only the exported file formats cross this boundary.
    """
    if MORPHOTOK is None:
        pytest.skip("morphotok CLI not installed; needed to produce id corpora")
    full = workdir / f"{name}_full.txt"
    with open(full, "w") as fh:
        subprocess.run(
            [MORPHOTOK, "gen-corpus", "--kind", kind, "--seed", str(seed), "--words", str(words)],
            stdout=fh,
            check=True,
        )
    lines = full.read_text().splitlines(keepends=True)
    split = (2 * len(lines)) // 3
    train_txt = workdir / f"{name}_train.txt"
    val_txt = workdir / f"{name}_val.txt"
    train_txt.write_text("".join(lines[:split]))
    val_txt.write_text("".join(lines[split:]))

    tok_dir = workdir / f"{name}_tok"
    subprocess.run(
        [MORPHOTOK, "train-bpe", str(train_txt), "--merges", "300", "--out", str(tok_dir)],
        check=True,
        capture_output=True,
    )
    paths = {"vocab": tok_dir / "vocab.tsv"}
    for split_name, txt in (("train", train_txt), ("val", val_txt)):
        out = workdir / f"{name}_{split_name}.ids"
        subprocess.run(
            [MORPHOTOK, "encode", str(txt), "--tokenizer", str(tok_dir), "--ids", "--out", str(out)],
            check=True,
            capture_output=True,
        )
        paths[split_name] = out
    return paths


@pytest.fixture(scope="session")
def overfit_log(tmp_path_factory):
    """Memorization run on the fixed 50-token corpus (4 layers, lr 1e-2)."""
    tmp = tmp_path_factory.mktemp("overfit")
    ids, vocab = write_tiny_corpus(tmp)
    cfg = LMConfig(
        steps=500, layers=4, heads=4, embed_dim=64, dropout=0.0,
        lr=1e-2, context_len=16, batch_size=8, seed=0, runs=1,
    )
    return train_lm(ids, vocab, cfg)[0]


@pytest.fixture(scope="session")
def generator_language(tmp_path_factory):
    """One agglutinative language's id corpora, produced via the CLI."""
    tmp = tmp_path_factory.mktemp("gen_lang")
    return prepare_language(tmp, "agg", "agglutinative", seed=701)
