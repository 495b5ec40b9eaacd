"""Command-line pipeline: ingest corpora, train tokenizers, compute metrics,
run the group statistics, and emit reports plus LM-harness inputs.

Exit codes: 0 success, 1 runtime/stage failure, 2 usage or config error.
`MORPHOTOK_THREADS` caps per-language worker threads (0 or unset = auto).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import bpe, metrics, report, stats
from .corpus import (
    Document,
    NormalizeConfig,
    SampleSchedule,
    WordStream,
    load_parallel,
    load_plaintext,
    normalize_and_split,
    normalize_corpus,
)

CORPUS_FORMATS = ("plaintext", "parallel")


class ConfigError(ValueError):
    """Batch of config validation problems, one message per line."""

    def __init__(self, problems: list[str]):
        super().__init__("invalid config:\n" + "\n".join(f"  - {p}" for p in problems))
        self.problems = problems


class StageError(RuntimeError):
    """Pipeline failure tagged with its stage (and language, when per-language)."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[stage:{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class LanguageSpec:
    lang: str
    group: str
    corpus_path: str
    corpus_format: str


@dataclass(frozen=True)
class ExperimentConfig:
    languages: tuple[LanguageSpec, ...]
    merge_counts: tuple[int, ...]
    top_n: int
    schedule: SampleSchedule
    normalize: NormalizeConfig
    trainer: bpe.TrainerConfig
    seed: int
    output_dir: str


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate the experiment config; reports every problem at once."""
    problems: list[str] = []
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"]) from exc

    langs: list[LanguageSpec] = []
    entries = raw.get("languages")
    if not isinstance(entries, list) or not entries:
        problems.append("languages: need a non-empty list")
        entries = []
    for i, entry in enumerate(entries):
        where = f"languages[{i}]"
        entry_ok = True
        for key in ("lang", "group", "corpus_path"):
            if not entry.get(key):
                problems.append(f"{where}.{key}: missing or empty")
                entry_ok = False
        group = entry.get("group")
        if group and group not in report.GROUPS:
            problems.append(f"{where}.group: must be one of {report.GROUPS}, got {group!r}")
            entry_ok = False
        fmt = entry.get("corpus_format", "plaintext")
        if fmt not in CORPUS_FORMATS:
            problems.append(f"{where}.corpus_format: must be one of {CORPUS_FORMATS}, got {fmt!r}")
            entry_ok = False
        if entry_ok:
            langs.append(
                LanguageSpec(
                    lang=entry["lang"],
                    group=group,
                    corpus_path=entry["corpus_path"],
                    corpus_format=fmt,
                )
            )
    seen = set()
    for spec in langs:
        if spec.lang in seen:
            problems.append(f"languages: duplicate lang {spec.lang!r}")
        seen.add(spec.lang)

    merge_counts = tuple(raw.get("merge_counts", [300, 400, 500]))
    if not merge_counts or any(not isinstance(m, int) or m <= 0 for m in merge_counts):
        problems.append("merge_counts: need positive integers")

    top_n = raw.get("top_n", 100)
    if not isinstance(top_n, int) or top_n < 2:
        problems.append("top_n: need an integer >= 2")

    schedule = None
    sched_raw = raw.get("schedule")
    if not isinstance(sched_raw, dict) or "sizes" not in sched_raw:
        problems.append("schedule.sizes: missing")
    else:
        try:
            schedule = SampleSchedule(
                sizes=tuple(sched_raw["sizes"]),
                seed=int(sched_raw.get("seed", raw.get("seed", 0))),
            )
        except (ValueError, TypeError) as exc:
            problems.append(f"schedule: {exc}")

    norm_raw = raw.get("normalize", {})
    normalize = NormalizeConfig(
        strip_punctuation=bool(norm_raw.get("strip_punctuation", True)),
        lowercase=bool(norm_raw.get("lowercase", False)),
    )

    trainer = None
    trainer_raw = raw.get("trainer", {})
    try:
        trainer = bpe.TrainerConfig(
            merge_limit=trainer_raw.get("merge_limit", max(merge_counts) if merge_counts else 500),
            vocab_limit=trainer_raw.get("vocab_limit"),
            intra_word_only=bool(trainer_raw.get("intra_word_only", True)),
        )
    except ValueError as exc:
        problems.append(f"trainer: {exc}")

    if not raw.get("output_dir"):
        problems.append("output_dir: missing or empty")

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        languages=tuple(langs),
        merge_counts=merge_counts,
        top_n=top_n,
        schedule=schedule,
        normalize=normalize,
        trainer=trainer,
        seed=int(raw.get("seed", 0)),
        output_dir=raw["output_dir"],
    )


def worker_count(n_tasks: int) -> int:
    """Thread cap from MORPHOTOK_THREADS; 0 or unset means auto."""
    raw = os.environ.get("MORPHOTOK_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def _load_documents(spec: LanguageSpec) -> list[Document]:
    if spec.corpus_format == "parallel":
        return load_parallel(spec.corpus_path, spec.lang)
    return load_plaintext(spec.corpus_path, spec.lang)


@dataclass
class _LanguageResult:
    record: report.LanguageRecord
    stream: WordStream


def _run_language(spec: LanguageSpec, cfg: ExperimentConfig, out_dir: Path) -> _LanguageResult:
    try:
        docs = _load_documents(spec)
    except (OSError, ValueError) as exc:
        raise StageError(f"ingest:{spec.lang}", str(exc)) from exc
    try:
        doc_streams = [normalize_and_split(d, cfg.normalize) for d in docs]
        stream = normalize_corpus(docs, cfg.normalize)
        if stream.total_words == 0:
            raise ValueError("corpus is empty after normalization")
    except ValueError as exc:
        raise StageError(f"normalize:{spec.lang}", str(exc)) from exc

    try:
        limit = max(cfg.merge_counts)
        if cfg.trainer.merge_limit is not None:
            limit = max(limit, cfg.trainer.merge_limit)
        table = bpe.train(
            stream,
            bpe.TrainerConfig(
                merge_limit=limit,
                vocab_limit=cfg.trainer.vocab_limit,
                intra_word_only=cfg.trainer.intra_word_only,
            ),
        )
        tok_dir = out_dir / "tokenizers" / spec.lang
        bpe.export_tokenizer(table, tok_dir)
        ids_dir = out_dir / "ids"
        ids_dir.mkdir(parents=True, exist_ok=True)
        bpe.write_id_corpus(
            (s.words for s in doc_streams if s.words), table, ids_dir / f"{spec.lang}.txt"
        )
    except ValueError as exc:
        raise StageError(f"train:{spec.lang}", str(exc)) from exc

    try:
        analysis_table = table.prefix(min(max(cfg.merge_counts), len(table.rules)))
        rho = metrics.productivity_rounds(stream, cfg.merge_counts, table=table)
        index = metrics.index_stream(stream, analysis_table)
        curve = metrics.frequency_curve(index, cfg.top_n, lang=spec.lang)
        fit = stats.ols_loglog(curve, cfg.top_n)
        trend = metrics.repetition_trend(stream, cfg.schedule, cfg.trainer, cfg.top_n)
    except ValueError as exc:
        raise StageError(f"metrics:{spec.lang}", str(exc)) from exc

    record = report.LanguageRecord(
        lang=spec.lang, group=spec.group, rho=rho, fit=fit, trend=trend, freq=curve
    )
    return _LanguageResult(record=record, stream=stream)


def run(config_path: str | Path) -> int:
    """Execute the full pipeline described by a config file."""
    cfg = load_config(config_path)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    specs = sorted(cfg.languages, key=lambda s: s.lang)
    workers = worker_count(len(specs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda s: _run_language(s, cfg, out_dir), specs))
    else:
        results = [_run_language(s, cfg, out_dir) for s in specs]

    records = [r.record for r in results]
    comparisons = []
    groups = {rec.group for rec in records}
    if groups == set(report.GROUPS):
        try:
            group_test = stats.sampled_group_test(
                {r.record.lang: r.stream for r in results},
                cfg.schedule,
                {s.lang: s.group for s in specs},
                table_cfg=cfg.trainer,
                top_k=cfg.top_n,
            )
        except ValueError as exc:
            raise StageError("group-test", str(exc)) from exc
        comparisons = [
            report.compare_groups(records, "rho.mean"),
            report.compare_groups(records, "fit.slope"),
            report.compare_groups(records, "fit.abs_slope"),
            report.compare_groups(records, "trend.final", test=group_test),
        ]

    try:
        report.emit_report(records, comparisons, out_dir)
    except OSError as exc:
        raise StageError("report", str(exc)) from exc
    return 0


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def _load_stream(path: str, fmt: str, lang: str, normalize: NormalizeConfig):
    spec = LanguageSpec(lang=lang, group="analytic", corpus_path=path, corpus_format=fmt)
    docs = _load_documents(spec)
    doc_streams = [normalize_and_split(d, normalize) for d in docs]
    return docs, doc_streams, normalize_corpus(docs, normalize)


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("corpus", help="corpus file path")
    p.add_argument("--format", choices=CORPUS_FORMATS, default="plaintext")
    p.add_argument("--lang", default="und", help="language code for the stream")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument(
        "--keep-punctuation", action="store_true", help="do not strip punctuation"
    )


def _norm_from_args(args) -> NormalizeConfig:
    return NormalizeConfig(
        strip_punctuation=not args.keep_punctuation, lowercase=args.lowercase
    )


def _cmd_run(args) -> int:
    return run(args.config)


def _cmd_train_bpe(args) -> int:
    _, _, stream = _load_stream(args.corpus, args.format, args.lang, _norm_from_args(args))
    table = bpe.train(
        stream, bpe.TrainerConfig(merge_limit=args.merges, vocab_limit=args.vocab_limit)
    )
    bpe.export_tokenizer(table, args.out)
    print(f"trained {len(table.rules)} merges, vocab {len(table.vocab)} -> {args.out}")
    return 0


def _cmd_encode(args) -> int:
    table = bpe.import_tokenizer(args.tokenizer)
    enc = bpe.Encoder(table)
    _, doc_streams, _ = _load_stream(args.corpus, args.format, args.lang, _norm_from_args(args))
    out = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else sys.stdout
    try:
        for s in doc_streams:
            if not s.words:
                continue
            if args.ids:
                out.write(" ".join(str(i) for i in enc.encode_ids(s.words)) + "\n")
            else:
                tokens = [tok for w in s.words for tok in enc.segment(w)]
                out.write(" ".join(tokens) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_productivity(args) -> int:
    merge_counts = tuple(int(m) for m in args.merges.split(","))
    _, _, stream = _load_stream(args.corpus, args.format, args.lang, _norm_from_args(args))
    result = metrics.productivity_rounds(stream, merge_counts)
    print(f"{result.mean_rho:.6f}")
    return 0


def _cmd_slopes(args) -> int:
    _, _, stream = _load_stream(args.corpus, args.format, args.lang, _norm_from_args(args))
    table = bpe.train(stream, bpe.TrainerConfig(merge_limit=args.merges))
    index = metrics.index_stream(stream, table)
    curve = metrics.frequency_curve(index, args.top, lang=args.lang)
    fit = stats.ols_loglog(curve, args.top)
    print(f"{fit.slope:.6f}")
    return 0


def _cmd_compare(args) -> int:
    cfg = load_config(args.config)
    path = Path(cfg.output_dir) / "report.json"
    if not path.exists():
        raise StageError("compare", f"{path} not found; run `morphotok run {args.config}` first")
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    for cmp in data.get("comparisons", []):
        test = cmp.get("test") or {}
        p_adj = test.get("p_adjusted")
        p_txt = "n/a" if p_adj is None else f"{p_adj:.6g}"
        print(
            f"{cmp['metric']}: {cmp['group_a']}={cmp['mean_a']:.6g} "
            f"{cmp['group_b']}={cmp['mean_b']:.6g} delta={cmp['delta']:.6g} "
            f"p_adjusted={p_txt}"
        )
    return 0


def _cmd_gen_corpus(args) -> int:
    cfg = stats.TypologyGenConfig(
        kind=args.kind,
        stem_count=args.stems,
        affix_count=args.affixes,
        affixes_per_word=(args.min_affixes, args.max_affixes),
        function_word_rate=args.function_rate,
        seed=args.seed,
        word_count=args.words,
    )
    stream = stats.generate_typology_corpus(cfg)
    line: list[str] = []
    for word in stream.words:
        line.append(word)
        if len(line) == 10:
            print(" ".join(line))
            line = []
    if line:
        print(" ".join(line))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphotok",
        description="Train BPE tokenizers and quantify subword regularity across typologies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute the full pipeline from a config file")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("train-bpe", help="train a tokenizer and export merges/vocab")
    _add_corpus_args(p)
    p.add_argument("--merges", type=int, required=True)
    p.add_argument("--vocab-limit", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_train_bpe)

    p = sub.add_parser("encode", help="encode a corpus with an exported tokenizer")
    _add_corpus_args(p)
    p.add_argument("--tokenizer", required=True, help="directory with merges.txt/vocab.tsv")
    p.add_argument("--ids", action="store_true", help="emit token ids instead of tokens")
    p.add_argument("--out", default=None, help="write to file instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_encode)

    p = sub.add_parser("productivity", help="mean subword productivity over merge rounds")
    _add_corpus_args(p)
    p.add_argument("--merges", default="300,400,500", help="comma-separated merge counts")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_productivity)

    p = sub.add_parser("slopes", help="log-log rank-frequency decay slope")
    _add_corpus_args(p)
    p.add_argument("--top", type=int, default=100)
    p.add_argument("--merges", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_slopes)

    p = sub.add_parser("compare", help="print group comparisons from a finished run")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("gen-corpus", help="emit a synthetic typology corpus to stdout")
    p.add_argument("--kind", choices=("analytic", "agglutinative"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--words", type=int, default=4000)
    p.add_argument("--stems", type=int, default=None, help="default: 40 agglutinative, 1000 analytic")
    p.add_argument("--affixes", type=int, default=None, help="default: 16 agglutinative, 12 analytic")
    p.add_argument("--min-affixes", type=int, default=2)
    p.add_argument("--max-affixes", type=int, default=4)
    p.add_argument("--function-rate", type=float, default=None)
    p.set_defaults(fn=_cmd_gen_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen-corpus":
        # per-kind defaults mirror the documented reference configurations
        if args.function_rate is None:
            args.function_rate = 0.05 if args.kind == "agglutinative" else 0.35
        if args.stems is None:
            args.stems = 40 if args.kind == "agglutinative" else 2500
        if args.affixes is None:
            args.affixes = 16 if args.kind == "agglutinative" else 12
    try:
        return args.fn(args)
    except (ConfigError, StageError, ValueError, OSError) as exc:
        print(f"morphotok: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
