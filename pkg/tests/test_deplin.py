import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sanskritkit.deplin import (
    DependencyLinearizer,
    DepSampleConfig,
    delinearize,
    linearize,
)
from sanskritkit.tagcodec import build_codebook
from sanskritkit.types import MorphTag, Sentence, Token, ValidationError


def _dep_sentence(specs, **kwargs):
    tokens = tuple(
        Token(index=i, form=form, head=head, deprel=rel, lemma=form,
              upos=kwargs.get("upos", "NOUN"),
              morph=kwargs.get("morph", MorphTag((("Case", "Nom"),))))
        for i, (form, head, rel) in enumerate(specs, start=1)
    )
    return Sentence(tokens=tokens, raw_text=" ".join(t.form for t in tokens))


CHAIN = _dep_sentence([("wa", 2, "a"), ("wb", 0, "root"), ("wc", 2, "b")])


class TestLinearize:
    def test_single_token(self):
        s = _dep_sentence([("ka", 0, "root")])
        source, target = linearize(s)
        assert source == "D ka"
        assert target == "0:root"

    def test_three_token_chain(self):
        source, target = linearize(CHAIN)
        assert source == "D wa wb wc"
        assert target == "2:a 0:root 2:b"

    def test_features_all_appends_pos_and_tag(self):
        source, _ = linearize(CHAIN, DepSampleConfig(features="all"))
        assert source == (
            "D wa_NOUN_Case=Nom wb_NOUN_Case=Nom wc_NOUN_Case=Nom"
        )

    def test_features_all_with_codebook(self):
        book = build_codebook({"Case=Nom": 1})
        source, _ = linearize(
            CHAIN, DepSampleConfig(features="all", tag_codebook=book)
        )
        assert source == "D wa_NOUN_f wb_NOUN_f wc_NOUN_f"

    def test_features_all_missing_morph_errors(self):
        s = _dep_sentence([("ka", 0, "root")], morph=MorphTag(()))
        with pytest.raises(ValidationError, match="morph"):
            linearize(s, DepSampleConfig(features="all"))

    def test_invalid_tree_rejected(self):
        s = _dep_sentence([("ka", 2, "a"), ("kha", 1, "b")])
        with pytest.raises(ValidationError, match="invalid dependency tree"):
            linearize(s)

    def test_label_codebook_encodes_relations(self):
        labels = build_codebook({"root": 3, "a": 2, "b": 1})
        _, target = linearize(CHAIN, DepSampleConfig(label_codebook=labels))
        assert target == "2:q 0:f 2:w"


class TestDelinearize:
    def test_round_trip_zero_repairs(self):
        source, target = linearize(CHAIN)
        sentence, report = delinearize(source, target)
        assert [t.head for t in sentence.tokens] == [2, 0, 2]
        assert [t.deprel for t in sentence.tokens] == ["a", "root", "b"]
        assert report.total == 0

    def test_out_of_range_head_repaired(self):
        sentence, report = delinearize("D a b c", "9:a 0:root 2:b")
        assert sentence.tokens[0].head == 0
        assert report.out_of_range == 1
        assert report.total == 1

    def test_short_target_padded(self):
        sentence, report = delinearize("D a b c", "2:a 0:root")
        assert sentence.tokens[2].head == 0
        assert sentence.tokens[2].deprel == "root"
        assert report.padded == 1
        assert report.total == 1

    def test_long_target_truncated(self):
        _, report = delinearize("D a", "0:root 1:x 1:y")
        assert report.truncated == 2

    def test_cycle_broken(self):
        sentence, report = delinearize("D a b", "2:a 1:b")
        assert report.detached == 1
        heads = [t.head for t in sentence.tokens]
        assert heads == [0, 1]

    def test_malformed_unit(self):
        sentence, report = delinearize("D a b", "nonsense 0:root")
        assert sentence.tokens[0].head == 0
        assert report.malformed_units == 1

    def test_label_codebook_decodes(self):
        labels = build_codebook({"root": 3, "a": 2, "b": 1})
        config = DepSampleConfig(label_codebook=labels)
        source, target = linearize(CHAIN, config)
        sentence, report = delinearize(source, target, config)
        assert [t.deprel for t in sentence.tokens] == ["a", "root", "b"]
        assert report.total == 0

    def test_round_trip_over_corpus(self, corpus_medium):
        corpus = corpus_medium[:800]
        for gold in corpus:
            source, target = linearize(gold)
            sentence, report = delinearize(source, target)
            assert report.total == 0
            assert [t.head for t in sentence.tokens] == [t.head for t in gold.tokens]
            assert [t.deprel for t in sentence.tokens] == [
                t.deprel for t in gold.tokens
            ]

    def _assert_valid(self, sentence):
        n = len(sentence)
        heads = [t.head for t in sentence.tokens]
        assert all(h is not None and 0 <= h <= n and h != i
                   for i, h in enumerate(heads, start=1))
        for start in range(1, n + 1):
            seen = set()
            node = start
            while node != 0:
                assert node not in seen, f"cycle at {node}: {heads}"
                seen.add(node)
                node = heads[node - 1]

    def test_fuzz_random_strings(self):
        rng = random.Random(13)
        alphabet = "0123456789:abc xyz._-"
        for _ in range(2000):
            source = "D " + "".join(
                rng.choice(alphabet) for _ in range(rng.randint(0, 30))
            )
            target = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
            sentence, _ = delinearize(source, target)
            self._assert_valid(sentence)

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=60), st.text(max_size=60))
    def test_fuzz_hypothesis(self, source, target):
        sentence, _ = delinearize(source, target)
        self._assert_valid(sentence)


class TestEstimator:
    def test_transform_inverse(self, corpus_small):
        corpus = corpus_small[:40]
        est = DependencyLinearizer().fit()
        pairs = est.transform(corpus)
        rebuilt = est.inverse_transform(pairs)
        assert all(report.total == 0 for _, report in rebuilt)
        heads = [[t.head for t in s.tokens] for s, _ in rebuilt]
        assert heads == [[t.head for t in s.tokens] for s in corpus]
