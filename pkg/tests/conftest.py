import pytest

from morphotok import bpe, stats


@pytest.fixture(scope="session")
def reference_streams():
    """The six documented generator corpora (seed 7, 3 languages per kind)."""
    return {
        lang: stats.generate_typology_corpus(cfg)
        for lang, cfg in stats.reference_typology_configs().items()
    }


@pytest.fixture(scope="session")
def reference_grouping(reference_streams):
    return {
        lang: ("synthetic" if lang.startswith("agg") else "analytic")
        for lang in reference_streams
    }


@pytest.fixture(scope="session")
def reference_tables(reference_streams):
    """One 500-merge table per reference corpus, shared across tests."""
    cfg = bpe.TrainerConfig(merge_limit=500)
    return {lang: bpe.train(s, cfg) for lang, s in reference_streams.items()}
