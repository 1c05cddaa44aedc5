import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sanskritkit.metrics import (
    cer_wer,
    diff_report,
    lemma_accuracy,
    levenshtein,
    perfect_match,
    uas_las,
)
from sanskritkit.types import Sentence, Token, ValidationError


def quadratic_edit_distance(a, b):
    """Independent oracle: full-matrix dynamic program, plain Python."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[n][m]


class TestPerfectMatch:
    def test_identical(self):
        assert perfect_match(["a", "b"], ["a", "b"]).value == 100.0

    def test_three_of_four(self):
        report = perfect_match(["a", "b", "c", "x"], ["a", "b", "c", "d"])
        assert report.value == 75.0
        assert (report.numerator, report.denominator) == (3, 4)

    def test_double_space_normalized(self):
        assert perfect_match(["a  b"], ["a b"]).value == 100.0

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            perfect_match(["a"], ["a", "b"])

    def test_reflexivity(self, corpus_small):
        texts = [s.raw_text for s in corpus_small[:100]]
        assert perfect_match(texts, texts).value == 100.0

    def test_per_category(self):
        report = perfect_match(
            ["a", "x", "b"], ["a", "y", "b"], categories=["V", "V", "E"]
        )
        assert report.category_value("V") == 50.0
        assert report.category_value("E") == 100.0

    def test_prenormalized_input_invariant(self):
        import unicodedata

        text = "mātā  aditiḥ"
        decomposed = unicodedata.normalize("NFD", text)
        assert perfect_match([decomposed], [text]).value == 100.0


def _tree(heads_rels):
    tokens = tuple(
        Token(index=i, form=f"w{i}", head=h, deprel=r)
        for i, (h, r) in enumerate(heads_rels, start=1)
    )
    return Sentence(tokens=tokens)


class TestUasLas:
    def test_all_correct(self):
        gold = _tree([(2, "a"), (0, "root")])
        uas, las = uas_las([gold], [gold])
        assert uas.value == 100.0
        assert las.value == 100.0

    def test_one_label_wrong(self):
        gold = _tree([(2, "a"), (0, "root"), (2, "b"), (2, "c")])
        pred = _tree([(2, "a"), (0, "root"), (2, "b"), (2, "X")])
        uas, las = uas_las([pred], [gold])
        assert uas.value == 100.0
        assert las.value == 75.0

    def test_all_heads_wrong(self):
        gold = _tree([(2, "a"), (0, "root")])
        pred = _tree([(0, "a"), (1, "root")])
        uas, las = uas_las([pred], [gold])
        assert uas.value == 0.0
        assert las.value == 0.0

    def test_token_count_mismatch(self):
        with pytest.raises(ValidationError):
            uas_las([_tree([(0, "root")])], [_tree([(2, "a"), (0, "root")])])

    def test_uas_never_below_las_random(self):
        rng = random.Random(5)
        rels = ["a", "b", "root"]
        for _ in range(200):
            n = rng.randint(1, 6)
            gold = _tree([(0, rng.choice(rels)) for _ in range(n)])
            pred = _tree(
                [
                    (rng.choice([h for h in range(n + 1) if h != i]), rng.choice(rels))
                    for i in range(1, n + 1)
                ]
            )
            uas, las = uas_las([pred], [gold])
            assert uas.value >= las.value


class TestCerWer:
    def test_identical(self):
        cer, wer = cer_wer(["abc"], ["abc"])
        assert cer.value == 0.0
        assert wer.value == 0.0

    def test_one_char_substitution(self):
        cer, _ = cer_wer(["abed"], ["abcd"])
        assert cer.value == 25.0

    def test_one_word_deleted(self):
        _, wer = cer_wer(["a"], ["a b"])
        assert wer.value == 50.0

    def test_empty_reference_total(self):
        with pytest.raises(ValidationError):
            cer_wer([""], [""])

    def test_matches_quadratic_oracle(self):
        rng = random.Random(11)
        alphabet = "ab āḥ"
        for _ in range(300):
            pred = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 25)))
            ref = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 25)))
            assert levenshtein(pred, ref) == quadratic_edit_distance(pred, ref)
            assert levenshtein(pred.split(), ref.split()) == quadratic_edit_distance(
                pred.split(), ref.split()
            )

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=20), st.text(max_size=20))
    def test_levenshtein_hypothesis(self, a, b):
        assert levenshtein(a, b) == quadratic_edit_distance(a, b)

    def test_normalization_idempotent(self):
        import unicodedata

        decomposed = unicodedata.normalize("NFD", "mātā")
        cer_once, _ = cer_wer([decomposed], ["mātā"])
        assert cer_once.value == 0.0


class TestLemmaAccuracy:
    def test_all_match(self):
        assert lemma_accuracy(["a", "b"], ["a", "b"]).value == 100.0

    def test_half_match(self):
        assert lemma_accuracy(["a", "x"], ["a", "b"]).value == 50.0

    def test_empty_errors(self):
        with pytest.raises(ValidationError):
            lemma_accuracy([], [])


class TestDiffReport:
    def test_identical_empty_report(self):
        report = diff_report(["a b c"], ["a b c"])
        assert len(report) == 0

    def test_dropped_word_is_missing(self):
        report = diff_report(["a c"], ["a b c"])
        assert [e.kind for e in report.entries] == ["missing-word"]
        assert report.entries[0].gold == "b"

    def test_added_word(self):
        report = diff_report(["a x b"], ["a b"])
        assert [e.kind for e in report.entries] == ["added-word"]

    def test_compound_split_is_segmentation_mismatch(self):
        # the model splits a compound the gold keeps intact
        report = diff_report(
            ["ādi-karaḥ"], ["ādikaraḥ"], tasks=("S",)
        )
        assert [e.kind for e in report.entries] == ["segmentation-mismatch"]

    def test_lemma_and_tag_classification(self):
        gold = ["ramaḥ_rama_f vanam_vana_q"]
        lemma_wrong = ["ramaḥ_ramaka_f vanam_vana_q"]
        tag_wrong = ["ramaḥ_rama_f vanam_vana_x"]
        report = diff_report(lemma_wrong, gold, tasks=("S", "L", "M"))
        assert [e.kind for e in report.entries] == ["lemma-mismatch"]
        report = diff_report(tag_wrong, gold, tasks=("S", "L", "M"))
        assert [e.kind for e in report.entries] == ["tag-mismatch"]

    def test_counts_summary(self):
        report = diff_report(["a b", "a"], ["a c", "a b"])
        counts = report.counts
        assert counts["segmentation-mismatch"] == 1
        assert counts["missing-word"] == 1
        assert "1 differences" not in report.to_text()
