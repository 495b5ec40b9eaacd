import random

import pytest

from morphotok.corpus import (
    CorpusFormatError,
    Document,
    NormalizeConfig,
    SampleSchedule,
    WordStream,
    align_verses,
    cumulative_samples,
    load_parallel,
    load_plaintext,
    normalize_and_split,
    normalize_corpus,
)


def write(path, text):
    path.write_bytes(text.encode("utf-8"))
    return path


class TestLoadPlaintext:
    def test_skips_empty_lines(self, tmp_path):
        p = write(tmp_path / "c.txt", "a b\n\nc\n")
        docs = load_plaintext(p, "xx")
        assert [d.text for d in docs] == ["a b", "c"]

    def test_empty_file(self, tmp_path):
        p = write(tmp_path / "c.txt", "")
        assert load_plaintext(p, "xx") == []

    def test_basque_fixture(self, tmp_path):
        lines = ["etxea handia da", "gizona etorri da", "liburua irakurri dut"]
        p = write(tmp_path / "eu.txt", "\n".join(lines) + "\n")
        docs = load_plaintext(p, "eu")
        assert len(docs) == 3
        assert all(d.lang == "eu" for d in docs)
        assert [d.text for d in docs] == lines

    def test_invalid_encoding_reports_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_bytes(b"fine line\n\xff\xfe broken\n")
        with pytest.raises(CorpusFormatError) as exc:
            load_plaintext(p, "xx")
        assert exc.value.line_number == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_plaintext(tmp_path / "nope.txt", "xx")


class TestLoadParallel:
    def test_single_record(self, tmp_path):
        p = write(tmp_path / "v.txt", "GEN.1.1\tIn the beginning\n")
        docs = load_parallel(p, "en")
        assert len(docs) == 1
        assert docs[0].source_id == "GEN.1.1"
        assert docs[0].text == "In the beginning"

    def test_missing_tab_is_error_with_line(self, tmp_path):
        p = write(tmp_path / "v.txt", "no tab here\n")
        with pytest.raises(CorpusFormatError) as exc:
            load_parallel(p, "en")
        assert exc.value.line_number == 1

    def test_record_count_preserved(self, tmp_path):
        rng = random.Random(3)
        lines = [f"V.{i}\ttext {rng.random()}" for i in range(57)]
        body = []
        for line in lines:
            body.append(line)
            if rng.random() < 0.2:
                body.append("")  # blank lines do not count
        p = write(tmp_path / "v.txt", "\n".join(body) + "\n")
        assert len(load_parallel(p, "xx")) == len(lines)

    def test_align_verses_intersection(self, tmp_path):
        a = write(tmp_path / "a.txt", "V1\tuno\nV2\tdos\nV3\ttres\nV9\tsobra\n")
        b = write(tmp_path / "b.txt", "V2\ttwo\nV1\tone\nV3\tthree\n")
        docs_a, docs_b = align_verses(load_parallel(a, "es"), load_parallel(b, "en"))
        assert len(docs_a) == len(docs_b) == 3
        assert [d.source_id for d in docs_a] == [d.source_id for d in docs_b]
        assert {d.source_id for d in docs_a} == {"V1", "V2", "V3"}
        # pairing holds: same verse id at the same position
        pair = dict(zip((d.source_id for d in docs_a), (d.text for d in docs_b)))
        assert pair["V2"] == "two"


class TestNormalizeAndSplit:
    def test_punctuation_stripping(self):
        ws = normalize_and_split(Document("en", "Hello, world.", "s"))
        assert ws.words == ("Hello", "world")

    def test_whitespace_collapse(self):
        ws = normalize_and_split(Document("en", "a  b", "s"))
        assert ws.words == ("a", "b")

    def test_keep_punctuation(self):
        cfg = NormalizeConfig(strip_punctuation=False)
        ws = normalize_and_split(Document("en", "Hello, world.", "s"), cfg)
        assert ws.words == ("Hello,", "world.")

    def test_lowercase_flag(self):
        cfg = NormalizeConfig(lowercase=True)
        ws = normalize_and_split(Document("en", "Hello World", "s"), cfg)
        assert ws.words == ("hello", "world")

    def test_mixed_script_hand_count(self):
        # Hand segmentation: punctuation splits, digits/symbols are not punctuation.
        text = (
            "Café déjà-vu: наука и жизнь! 中文 分词 test, "
            "ελληνικά λέξεις; foo_bar x² plus (two) more... 3,5 kg"
        )
        expected = (
            "Café", "déjà", "vu", "наука", "и", "жизнь", "中文", "分词", "test",
            "ελληνικά", "λέξεις", "foo", "bar", "x²", "plus", "two", "more",
            "3", "5", "kg",
        )
        ws = normalize_and_split(Document("mul", text, "s"))
        assert ws.words == expected
        assert ws.total_words == 20

    def test_idempotent(self):
        docs = [
            Document("en", "Hello, world. It's nice!", "s"),
            Document("mul", "Café -- déjà\tvu; 10,5 x", "s"),
            Document("en", "", "s"),
        ]
        for doc in docs:
            first = normalize_and_split(doc)
            again = normalize_and_split(Document(doc.lang, " ".join(first.words), "s"))
            assert again.words == first.words

    def test_nfc_applied(self):
        # e + combining acute composes to the single code point
        ws = normalize_and_split(Document("fr", "café", "s"))
        assert ws.words == ("café",)

    def test_normalize_corpus_concat_and_lang_check(self):
        docs = [Document("en", "a b", "1"), Document("en", "c", "2")]
        assert normalize_corpus(docs).words == ("a", "b", "c")
        with pytest.raises(ValueError):
            normalize_corpus([Document("en", "a", "1"), Document("fr", "b", "2")])


class TestWordStream:
    def test_rejects_invalid_words(self):
        with pytest.raises(ValueError):
            WordStream(words=("ok", ""), lang="xx")
        with pytest.raises(ValueError):
            WordStream(words=("a b",), lang="xx")

    def test_total_words(self):
        assert WordStream(words=("a", "b"), lang="xx").total_words == 2

    def test_document_requires_lang(self):
        with pytest.raises(ValueError):
            Document("", "text", "s")


class TestCumulativeSamples:
    def stream(self, n=10):
        return WordStream(words=tuple(f"w{i}" for i in range(n)), lang="xx")

    def test_prefix_mode(self):
        out = cumulative_samples(self.stream(), SampleSchedule(sizes=(2, 5), seed=-1))
        assert [s.total_words for s in out] == [2, 5]
        assert out[0].words == self.stream().words[:2]
        assert out[1].words[:2] == out[0].words

    def test_out_of_bounds(self):
        with pytest.raises(ValueError):
            cumulative_samples(self.stream(), SampleSchedule(sizes=(11,), seed=-1))

    def test_shuffle_deterministic(self):
        sched = SampleSchedule(sizes=(3, 7), seed=42)
        a = cumulative_samples(self.stream(), sched)
        b = cumulative_samples(self.stream(), sched)
        assert [s.words for s in a] == [s.words for s in b]

    def test_shuffle_nested(self):
        out = cumulative_samples(self.stream(), SampleSchedule(sizes=(2, 5, 9), seed=7))
        for small, big in zip(out, out[1:]):
            assert big.words[: small.total_words] == small.words

    def test_different_seeds_differ(self):
        a = cumulative_samples(self.stream(50), SampleSchedule(sizes=(20,), seed=1))
        b = cumulative_samples(self.stream(50), SampleSchedule(sizes=(20,), seed=2))
        assert a[0].words != b[0].words

    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            SampleSchedule(sizes=())
        with pytest.raises(ValueError):
            SampleSchedule(sizes=(3, 3))
        with pytest.raises(ValueError):
            SampleSchedule(sizes=(0, 2))
