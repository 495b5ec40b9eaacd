"""Group aggregation and deterministic machine-readable report emission.

All numeric output is rounded to 6 significant digits before serialization,
keys are emitted in sorted order, and files use LF endings, so re-running on
identical inputs reproduces every output byte for byte.
"""

from __future__ import annotations

import json
import math
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .metrics import FrequencyCurve, ProductivityResult, TrendCurve, sample_std
from .stats import RegressionFit, TestResult, welch_t_test

SCHEMA_VERSION = 1

GROUPS = ("analytic", "synthetic")


@dataclass(frozen=True)
class LMRunSummary:
    """Final metrics of one language-model training run."""

    lang: str
    run_id: int
    final_loss: float
    final_perplexity: float
    curve_path: str

    def __post_init__(self):
        if not math.isclose(self.final_perplexity, math.exp(self.final_loss), rel_tol=1e-6):
            raise ValueError("final_perplexity must equal exp(final_loss)")


@dataclass(frozen=True)
class LanguageRecord:
    """Everything measured for one language, plus its typology group."""

    lang: str
    group: str
    rho: ProductivityResult
    fit: RegressionFit
    trend: TrendCurve
    freq: FrequencyCurve | None = None
    lm_runs: tuple[LMRunSummary, ...] | None = None

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ValueError(f"group must be one of {GROUPS}, got {self.group!r}")


@dataclass(frozen=True)
class GroupComparison:
    metric_name: str
    group_a: str
    group_b: str
    mean_a: float
    mean_b: float
    delta: float
    sigma_a: float
    sigma_b: float
    test: TestResult | None


def mean_final_loss(record: LanguageRecord) -> float:
    """Per-language mean of final losses across LM runs."""
    if not record.lm_runs:
        raise ValueError(f"no LM runs recorded for {record.lang}")
    return sum(r.final_loss for r in record.lm_runs) / len(record.lm_runs)


_NAMED_METRICS: dict[str, Callable[[LanguageRecord], float]] = {
    "rho.mean": lambda rec: rec.rho.mean_rho,
    "fit.slope": lambda rec: rec.fit.slope,
    "fit.abs_slope": lambda rec: abs(rec.fit.slope),
    "trend.final": lambda rec: rec.trend.values[-1],
    "lm.final_loss": mean_final_loss,
}


def compare_groups(
    records: Sequence[LanguageRecord],
    metric: str | Callable[[LanguageRecord], float],
    metric_name: str | None = None,
    group_a: str = "synthetic",
    group_b: str = "analytic",
    test: TestResult | None = None,
) -> GroupComparison:
    """Per-group mean / sample deviation of a metric, their difference, and a test.

    `metric` is a registered name (rho.mean, fit.slope, fit.abs_slope,
    trend.final, lm.final_loss) or any callable on a record. delta is exactly
    mean_a - mean_b. When no test is supplied, a Welch t-test on the
    per-language values is attached if both groups have at least two members.
    """
    if isinstance(metric, str):
        if metric not in _NAMED_METRICS:
            raise ValueError(f"unknown metric {metric!r}; known: {sorted(_NAMED_METRICS)}")
        fn = _NAMED_METRICS[metric]
        name = metric_name or metric
    else:
        fn = metric
        name = metric_name or getattr(metric, "__name__", "custom")

    values_a = [fn(rec) for rec in records if rec.group == group_a]
    values_b = [fn(rec) for rec in records if rec.group == group_b]
    if not values_a or not values_b:
        raise ValueError(f"both groups need at least one record ({group_a!r}, {group_b!r})")

    mean_a = sum(values_a) / len(values_a)
    mean_b = sum(values_b) / len(values_b)
    if test is None and len(values_a) >= 2 and len(values_b) >= 2:
        test = welch_t_test(values_a, values_b)
    return GroupComparison(
        metric_name=name,
        group_a=group_a,
        group_b=group_b,
        mean_a=mean_a,
        mean_b=mean_b,
        delta=mean_a - mean_b,
        sigma_a=sample_std(values_a),
        sigma_b=sample_std(values_b),
        test=test,
    )


# ---------------------------------------------------------------------------
# Serialization.
# ---------------------------------------------------------------------------


def _num(x):
    """Round to 6 significant digits; non-finite values become null."""
    if isinstance(x, bool) or isinstance(x, int):
        return x
    if not math.isfinite(x):
        return None
    return float(f"{x:.6g}")


def _fmt(x) -> str:
    """CSV cell formatting: 6 significant digits for floats."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _test_dict(test: TestResult | None):
    if test is None:
        return None
    df = list(test.df) if isinstance(test.df, tuple) else test.df
    return {
        "statistic": _num(test.statistic),
        "p_value": _num(test.p_value),
        "p_adjusted": _num(test.p_adjusted),
        "df": [_num(v) for v in df] if isinstance(df, list) else _num(df),
        "method": test.method,
        "degenerate": not math.isfinite(test.statistic),
    }


def _record_dict(rec: LanguageRecord):
    out = {
        "lang": rec.lang,
        "group": rec.group,
        "productivity": {
            "per_round": [[m, _num(rec.rho.per_round[m])] for m in sorted(rec.rho.per_round)],
            "mean_rho": _num(rec.rho.mean_rho),
            "std_rho": _num(rec.rho.std_rho),
        },
        "fit": {
            "slope": _num(rec.fit.slope),
            "intercept": _num(rec.fit.intercept),
            "r": _num(rec.fit.r),
            "r_squared": _num(rec.fit.r_squared),
            "n": rec.fit.n,
            "degenerate": rec.fit.degenerate,
        },
        "trend": {
            "sample_sizes": list(rec.trend.sample_sizes),
            "values": [_num(v) for v in rec.trend.values],
        },
    }
    if rec.freq is not None:
        out["frequency"] = {
            "total_tokens": rec.freq.total_tokens,
            "freqs": [_num(f) for f in rec.freq.freqs],
        }
    if rec.lm_runs:
        out["lm_runs"] = [
            {
                "run_id": run.run_id,
                "final_loss": _num(run.final_loss),
                "final_perplexity": _num(run.final_perplexity),
                "curve_file": Path(run.curve_path).name,
            }
            for run in rec.lm_runs
        ]
    return out


def _comparison_dict(cmp: GroupComparison):
    return {
        "metric": cmp.metric_name,
        "group_a": cmp.group_a,
        "group_b": cmp.group_b,
        "mean_a": _num(cmp.mean_a),
        "mean_b": _num(cmp.mean_b),
        "delta": _num(cmp.delta),
        "sigma_a": _num(cmp.sigma_a),
        "sigma_b": _num(cmp.sigma_b),
        "test": _test_dict(cmp.test),
    }


def write_json(data, path: str | Path) -> None:
    """Deterministic JSON dump: sorted keys, 2-space indent, trailing newline."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write("\n")


def rewrite_report(src: str | Path, dst: str | Path) -> None:
    """Parse a report.json and re-emit it; output is byte-identical to input."""
    with open(src, encoding="utf-8") as fh:
        data = json.load(fh)
    write_json(data, dst)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def emit_report(
    records: Sequence[LanguageRecord],
    comparisons: Sequence[GroupComparison],
    out_dir: str | Path,
) -> None:
    """Write report.json plus the CSV set into a directory.

    Produces table1.csv (slope table analogue), productivity.csv, one
    trend_<lang>.csv and freq_<lang>.csv per language, and copies any LM
    training curves referenced by the records.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: r.lang)

    write_json(
        {
            "schema_version": SCHEMA_VERSION,
            "languages": [_record_dict(r) for r in records],
            "comparisons": [_comparison_dict(c) for c in comparisons],
        },
        out_dir / "report.json",
    )

    _write_csv(
        out_dir / "table1.csv",
        ["lang", "type", "slope", "r", "r2"],
        [[r.lang, r.group, r.fit.slope, r.fit.r, r.fit.r_squared] for r in records],
    )
    _write_csv(
        out_dir / "productivity.csv",
        ["lang", "group", "merges", "rho", "mean_rho", "std_rho"],
        [
            [r.lang, r.group, m, r.rho.per_round[m], r.rho.mean_rho, r.rho.std_rho]
            for r in records
            for m in sorted(r.rho.per_round)
        ],
    )
    for rec in records:
        _write_csv(
            out_dir / f"trend_{rec.lang}.csv",
            ["sample_size", "value"],
            list(zip(rec.trend.sample_sizes, rec.trend.values)),
        )
        if rec.freq is not None:
            _write_csv(
                out_dir / f"freq_{rec.lang}.csv",
                ["rank", "frequency"],
                [(i + 1, f) for i, f in enumerate(rec.freq.freqs)],
            )
        for run in rec.lm_runs or ():
            src = Path(run.curve_path)
            shutil.copyfile(src, out_dir / f"lm_curves_{rec.lang}_{run.run_id}.csv")
