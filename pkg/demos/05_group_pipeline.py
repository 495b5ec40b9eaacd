"""Run the whole pipeline from a config file, exactly like the CLI does.

Writes six generated corpora to disk, builds a config, executes
ingest -> train -> metrics -> statistics -> report, then reads the emitted
report.json back. Everything under out/ is deterministic: re-running this
script reproduces identical bytes.
"""

import json
import tempfile
from pathlib import Path

from morphotok import cli, stats

workdir = Path(tempfile.mkdtemp(prefix="morphotok_demo_"))
languages = []
for lang, cfg in stats.reference_typology_configs(word_count=2000).items():
    stream = stats.generate_typology_corpus(cfg)
    path = workdir / f"{lang}.txt"
    lines = [" ".join(stream.words[i : i + 10]) for i in range(0, len(stream.words), 10)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    languages.append(
        {
            "lang": lang,
            "group": "synthetic" if cfg.kind == "agglutinative" else "analytic",
            "corpus_path": str(path),
            "corpus_format": "plaintext",
        }
    )

config = {
    "languages": languages,
    "merge_counts": [100, 200, 300],
    "top_n": 100,
    "schedule": {"sizes": [500, 1000, 1500], "seed": -1},
    "normalize": {"strip_punctuation": True, "lowercase": False},
    "trainer": {"merge_limit": 300},
    "seed": 0,
    "output_dir": str(workdir / "out"),
}
config_path = workdir / "config.json"
config_path.write_text(json.dumps(config, indent=2))

rc = cli.main(["run", str(config_path)])
print(f"pipeline exit status: {rc}")

report = json.loads((workdir / "out" / "report.json").read_text())
print(f"\nlanguages in report: {[r['lang'] for r in report['languages']]}")
print("group comparisons (synthetic minus analytic):")
for cmp in report["comparisons"]:
    test = cmp.get("test") or {}
    print(
        f"  {cmp['metric']:14s} delta {cmp['delta']:+.4f}   "
        f"p_adjusted {test.get('p_adjusted')}"
    )
print(f"\nfull output set in {workdir / 'out'}")
