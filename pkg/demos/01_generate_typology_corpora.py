"""Generate the two kinds of synthetic typology corpora and eyeball them.

Agglutinative corpora glue Zipf-weighted stems to a small closed affix set,
so the same subwords recur across thousands of distinct surface words.
Analytic corpora emit bare stems plus very frequent function words.
"""

from collections import Counter

from morphotok import stats

for kind in ("agglutinative", "analytic"):
    cfg = stats.TypologyGenConfig(
        kind=kind,
        stem_count=40 if kind == "agglutinative" else 1000,
        function_word_rate=0.05 if kind == "agglutinative" else 0.35,
        seed=7,
        word_count=4000,
    )
    stream = stats.generate_typology_corpus(cfg)
    types = Counter(stream.words)
    print(f"--- {kind} (seed {cfg.seed}) ---")
    print(f"words: {stream.total_words}, distinct types: {len(types)}")
    print("first twelve words:", " ".join(stream.words[:12]))
    print("most frequent types:", types.most_common(5))
    print()

print("Same config, same stream, every time:")
cfg = stats.TypologyGenConfig(
    kind="agglutinative", function_word_rate=0.05, seed=3, word_count=10
)
print(" ", stats.generate_typology_corpus(cfg).words)
print(" ", stats.generate_typology_corpus(cfg).words)
