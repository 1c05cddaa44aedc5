import io

import pytest

from sanskritkit.conllu import (
    ReadStats,
    apply_manifest,
    make_splits,
    read_conllu,
    read_conllu_string,
    read_manifest,
    write_conllu,
    write_manifest,
)
from sanskritkit.types import Sentence, Token, ValidationError

MINIMAL = "1\tmātā\tmātṛ\t_\t_\t_\t0\troot\t_\t_\n\n"


class TestRead:
    def test_minimal_one_token_file(self):
        sentences = read_conllu_string(MINIMAL)
        assert len(sentences) == 1
        token = sentences[0].tokens[0]
        assert token.form == "mātā"
        assert token.head == 0
        assert token.deprel == "root"

    def test_text_comment_populates_raw_text(self):
        text = "# text = mātāditiḥ\n" + MINIMAL
        assert read_conllu_string(text)[0].raw_text == "mātāditiḥ"

    def test_unsandhied_misc_attribute(self):
        line = (
            "1\tmātāditiḥ\t_\t_\t_\t_\t0\troot\t_\t"
            "Unsandhied=mātā|Reconstructed=Yes\n\n"
        )
        token = read_conllu_string(line)[0].tokens[0]
        assert token.surface_sandhied == "mātāditiḥ"
        assert token.form == "mātā"
        assert token.reconstructed

    def test_malformed_column_count(self):
        with pytest.raises(ValidationError, match="line 1"):
            read_conllu_string("1\tbad\n\n")

    def test_non_integer_head(self):
        bad = MINIMAL.replace("\t0\troot", "\tX\troot")
        with pytest.raises(ValidationError, match="non-integer head"):
            read_conllu_string(bad)

    def test_compound_lines_skipped_with_count(self):
        text = (
            "1-2\tdvau\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tdva\tdva\t_\t_\t_\t0\troot\t_\t_\n"
            "2\tu\tu\t_\t_\t_\t1\tdep\t_\t_\n\n"
        )
        stats = ReadStats()
        sentences = list(read_conllu(io.StringIO(text), stats=stats))
        assert len(sentences[0]) == 2
        assert stats.skipped_lines == 1

    def test_mantra_comment(self):
        text = "# mantra = yes\n" + MINIMAL
        assert read_conllu_string(text)[0].is_mantra

    def test_sent_id_fallback_for_text_id(self):
        text = "# sent_id = kavya-12\n" + MINIMAL
        assert read_conllu_string(text)[0].text_id == "kavya-12"


class TestRoundTrip:
    def test_empty_corpus(self):
        assert read_conllu_string(write_conllu([])) == []

    def test_single_sentence(self):
        s = Sentence(
            tokens=(
                Token(index=1, form="yuvoḥ", surface_sandhied="yuvorhi",
                      lemma="yuvan", head=2, deprel="nmod"),
                Token(index=2, form="hi", surface_sandhied="", lemma="hi",
                      head=0, deprel="root", reconstructed=True),
            ),
            text_id="rv-1", category="Vedic", raw_text="yuvorhi", is_mantra=True,
        )
        assert read_conllu_string(write_conllu([s])) == [s]

    def test_thousand_random_sentences(self, corpus_medium):
        corpus = corpus_medium[:1000]
        assert read_conllu_string(write_conllu(corpus)) == corpus


def _plain_corpus(n, reconstructed=()):
    out = []
    for i in range(n):
        out.append(
            Sentence(
                tokens=(Token(index=1, form=f"w{i}", lemma=f"w{i}",
                              reconstructed=i in reconstructed, head=0,
                              deprel="root"),),
                text_id=f"doc-{i}",
                raw_text=f"w{i}",
            )
        )
    return out


class TestMakeSplits:
    def test_basic_partition(self):
        split = make_splits(_plain_corpus(10), dev_size=1, test_size=1, seed=1)
        assert (len(split.train), len(split.dev), len(split.test)) == (8, 1, 1)

    def test_all_reconstructed_shortfall(self):
        corpus = _plain_corpus(5, reconstructed=range(5))
        with pytest.raises(ValidationError, match="shortfall"):
            make_splits(corpus, dev_size=1, test_size=0, seed=1)

    def test_seeded_runs_identical(self, corpus_medium):
        corpus = corpus_medium[:500]
        first = make_splits(corpus, 40, 40, seed=9)
        second = make_splits(corpus, 40, 40, seed=9)
        assert first.manifest == second.manifest
        assert write_manifest(first.manifest) == write_manifest(second.manifest)

    def test_no_reconstructed_in_dev_or_test(self, corpus_medium):
        corpus = corpus_medium[:800]
        split = make_splits(corpus, 50, 50, seed=3)
        assert not any(s.has_reconstructed for s in split.dev)
        assert not any(s.has_reconstructed for s in split.test)

    def test_exclusions_predicate(self, corpus_medium):
        corpus = corpus_medium[:800]
        split = make_splits(
            corpus, 30, 30, exclusions=lambda s: s.category == "Vedic", seed=3
        )
        assert not any(s.category == "Vedic" for s in split.dev + split.test)

    def test_order_preserved_and_disjoint(self, corpus_medium):
        corpus = corpus_medium[:600]
        split = make_splits(corpus, 40, 40, seed=5)
        position = {id(s): i for i, s in enumerate(corpus)}
        for part in (split.train, split.dev, split.test):
            ordinals = [position[id(s)] for s in part]
            assert ordinals == sorted(ordinals)
        all_ids = [id(s) for part in split for s in part]
        assert len(all_ids) == len(set(all_ids)) == len(corpus)

    def test_oversized_request(self):
        with pytest.raises(ValidationError):
            make_splits(_plain_corpus(4), dev_size=2, test_size=2)

    def test_manifest_file_round_trip(self, tmp_path, corpus_medium):
        corpus = corpus_medium[:300]
        split = make_splits(corpus, 20, 20, seed=2)
        path = tmp_path / "manifest.tsv"
        write_manifest(split.manifest, path)
        loaded = read_manifest(path)
        assert loaded.dev_ordinals == split.manifest.dev_ordinals
        assert loaded.test_ordinals == split.manifest.test_ordinals
        replayed = apply_manifest(corpus, loaded)
        assert replayed.dev == split.dev
        assert replayed.test == split.test

    def test_apply_manifest_rejects_overlap(self, corpus_medium):
        from sanskritkit.conllu import SplitManifest

        with pytest.raises(ValidationError):
            apply_manifest(
                corpus_medium[:10],
                SplitManifest(seed=0, dev_ordinals=(1,), test_ordinals=(1,)),
            )
