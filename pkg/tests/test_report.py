import json
import math

import pytest

from morphotok.metrics import FrequencyCurve, ProductivityResult, TrendCurve
from morphotok.report import (
    GroupComparison,
    LanguageRecord,
    LMRunSummary,
    compare_groups,
    emit_report,
    mean_final_loss,
    rewrite_report,
)
from morphotok.stats import RegressionFit


def make_record(lang, group, rho=2.0, slope=-1.0, lm_losses=None, tmp_path=None):
    lm_runs = None
    if lm_losses is not None:
        lm_runs = tuple(
            LMRunSummary(
                lang=lang,
                run_id=i,
                final_loss=loss,
                final_perplexity=math.exp(loss),
                curve_path=str(tmp_path / f"curve_{lang}_{i}.csv") if tmp_path else "x.csv",
            )
            for i, loss in enumerate(lm_losses)
        )
    return LanguageRecord(
        lang=lang,
        group=group,
        rho=ProductivityResult(lang=lang, per_round={300: rho, 400: rho, 500: rho}, mean_rho=rho, std_rho=0.0),
        fit=RegressionFit(slope=slope, intercept=-1.2, r=-0.99, r_squared=0.98, n=100),
        trend=TrendCurve(lang=lang, sample_sizes=(100, 200), values=(0.01, 0.009)),
        freq=FrequencyCurve(lang=lang, freqs=(0.5, 0.3, 0.2), total_tokens=10),
        lm_runs=lm_runs,
    )


class TestLMRunSummary:
    def test_consistency_enforced(self):
        LMRunSummary("xx", 0, 2.0, math.exp(2.0), "c.csv")
        with pytest.raises(ValueError):
            LMRunSummary("xx", 0, 2.0, 8.0, "c.csv")

    def test_group_validated(self):
        with pytest.raises(ValueError):
            make_record("xx", "isolating")


class TestCompareGroups:
    def test_identical_groups_zero_delta(self):
        records = [
            make_record("s1", "synthetic", rho=1.0),
            make_record("s2", "synthetic", rho=1.0),
            make_record("a1", "analytic", rho=1.0),
            make_record("a2", "analytic", rho=1.0),
        ]
        cmp = compare_groups(records, "rho.mean")
        assert cmp.delta == 0.0
        assert cmp.sigma_a == 0.0
        assert cmp.sigma_b == 0.0

    def test_loss_fixture_mirrors_group_gap(self, tmp_path):
        # synthetic losses tight around 2, analytic spread around 3
        records = [
            make_record("s1", "synthetic", lm_losses=[2.0]),
            make_record("s2", "synthetic", lm_losses=[2.05]),
            make_record("s3", "synthetic", lm_losses=[2.1]),
            make_record("a1", "analytic", lm_losses=[3.0]),
            make_record("a2", "analytic", lm_losses=[3.5]),
            make_record("a3", "analytic", lm_losses=[2.7]),
        ]
        cmp = compare_groups(records, "lm.final_loss")
        assert cmp.delta == pytest.approx(-1.0166666666666666)
        assert cmp.sigma_a < 0.1
        assert cmp.sigma_b == pytest.approx(0.40414518843273806)

    def test_swapping_groups_negates_delta(self):
        records = [
            make_record("s1", "synthetic", rho=5.0),
            make_record("s2", "synthetic", rho=6.0),
            make_record("a1", "analytic", rho=2.0),
            make_record("a2", "analytic", rho=3.0),
        ]
        fwd = compare_groups(records, "rho.mean")
        bwd = compare_groups(records, "rho.mean", group_a="analytic", group_b="synthetic")
        assert fwd.delta == -bwd.delta
        assert fwd.sigma_a == bwd.sigma_b
        assert fwd.sigma_b == bwd.sigma_a

    def test_exact_delta_identity(self):
        records = [
            make_record("s1", "synthetic", rho=5.3),
            make_record("s2", "synthetic", rho=6.1),
            make_record("a1", "analytic", rho=2.7),
            make_record("a2", "analytic", rho=3.9),
        ]
        cmp = compare_groups(records, "rho.mean")
        assert cmp.delta == cmp.mean_a - cmp.mean_b

    def test_callable_metric(self):
        records = [
            make_record("s1", "synthetic", slope=-0.6),
            make_record("s2", "synthetic", slope=-0.7),
            make_record("a1", "analytic", slope=-1.0),
            make_record("a2", "analytic", slope=-1.1),
        ]
        cmp = compare_groups(records, lambda r: abs(r.fit.slope), metric_name="abs_slope")
        assert cmp.metric_name == "abs_slope"
        assert cmp.delta < 0

    def test_unknown_metric_and_empty_group(self):
        records = [make_record("s1", "synthetic")]
        with pytest.raises(ValueError):
            compare_groups(records, "nope.metric")
        with pytest.raises(ValueError):
            compare_groups(records, "rho.mean")  # analytic side empty

    def test_mean_final_loss_requires_runs(self):
        with pytest.raises(ValueError):
            mean_final_loss(make_record("s1", "synthetic"))


class TestEmitReport:
    def records(self, tmp_path=None, lm=False):
        kw = {}
        recs = [
            make_record("agg1", "synthetic", rho=16.0, slope=-0.54),
            make_record("ana1", "analytic", rho=3.6, slope=-1.0),
        ]
        if lm:
            for i, r in enumerate(recs):
                curve = tmp_path / f"lm_curves_{r.lang}_0.csv"
                curve.write_text("step,split,loss,ppl\n1,train,2.0,7.389056\n")
                recs[i] = make_record(r.lang, r.group, lm_losses=[2.0], tmp_path=tmp_path)
                (tmp_path / f"curve_{r.lang}_0.csv").write_text("step,split,loss,ppl\n")
        return recs

    def test_empty_records_valid_schema(self, tmp_path):
        emit_report([], [], tmp_path)
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["schema_version"] == 1
        assert data["languages"] == []
        assert data["comparisons"] == []

    def test_deterministic_rerun(self, tmp_path):
        records = self.records()
        comparisons = [compare_groups(records, "rho.mean")]
        out1 = tmp_path / "r1"
        out2 = tmp_path / "r2"
        emit_report(records, comparisons, out1)
        emit_report(records, comparisons, out2)
        for name in ("report.json", "table1.csv", "productivity.csv", "trend_agg1.csv", "freq_ana1.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_idempotent_overwrite(self, tmp_path):
        records = self.records()
        emit_report(records, [], tmp_path)
        first = (tmp_path / "report.json").read_bytes()
        emit_report(records, [], tmp_path)
        assert (tmp_path / "report.json").read_bytes() == first

    def test_table1_rows_match_language_count(self, tmp_path):
        emit_report(self.records(), [], tmp_path)
        lines = (tmp_path / "table1.csv").read_text().splitlines()
        assert lines[0] == "lang,type,slope,r,r2"
        assert len(lines) == 1 + 2

    def test_productivity_rows(self, tmp_path):
        emit_report(self.records(), [], tmp_path)
        lines = (tmp_path / "productivity.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 3  # header + 2 languages x 3 rounds

    def test_round_trip_bytes(self, tmp_path):
        records = self.records()
        emit_report(records, [compare_groups(records, "rho.mean")], tmp_path)
        rewrite_report(tmp_path / "report.json", tmp_path / "copy.json")
        assert (tmp_path / "copy.json").read_bytes() == (tmp_path / "report.json").read_bytes()

    def test_six_significant_digits(self, tmp_path):
        rec = make_record("agg1", "synthetic", rho=1.2345678901234)
        emit_report([rec], [], tmp_path)
        data = json.loads((tmp_path / "report.json").read_text())
        assert data["languages"][0]["productivity"]["mean_rho"] == 1.23457

    def test_no_nan_in_output(self, tmp_path):
        rec = make_record("agg1", "synthetic")
        degenerate = LanguageRecord(
            lang="deg",
            group="analytic",
            rho=rec.rho,
            fit=RegressionFit(slope=0.0, intercept=0.0, r=0.0, r_squared=0.0, n=4, degenerate=True),
            trend=rec.trend,
            freq=rec.freq,
        )
        emit_report([rec, degenerate], [], tmp_path)
        text = (tmp_path / "report.json").read_text()
        assert "NaN" not in text and "Infinity" not in text
        data = json.loads(text)
        deg = [r for r in data["languages"] if r["lang"] == "deg"][0]
        assert deg["fit"]["degenerate"] is True

    def test_lm_curves_copied(self, tmp_path):
        records = self.records(tmp_path, lm=True)
        emit_report(records, [], tmp_path / "out")
        assert (tmp_path / "out" / "lm_curves_agg1_0.csv").exists()
        data = json.loads((tmp_path / "out" / "report.json").read_text())
        lang = [r for r in data["languages"] if r["lang"] == "agg1"][0]
        assert lang["lm_runs"][0]["final_loss"] == 2.0
