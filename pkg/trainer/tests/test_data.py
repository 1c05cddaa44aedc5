import pytest
import torch

from trainer_service.data import (
    SampleFormatError,
    batch_iterator,
    load_pairs,
    longest_lengths,
    make_batch,
)
from trainer_service.vocab import BOS, EOS, PAD, VOCAB_SIZE, decode, encode


class TestVocab:
    def test_round_trip(self):
        for text in ("mātā aditiḥ", "", "S abc"):
            assert decode(encode(text)) == text

    def test_truncation_by_bytes(self):
        ids = encode("āāā", max_len=4)  # 2 bytes per char
        assert decode(ids) == "āā"

    def test_vocab_bounds(self):
        ids = encode("any text")
        assert all(0 <= i < VOCAB_SIZE for i in ids)
        assert ids[-1] == EOS


class TestLoadPairs:
    def test_skips_comments_and_blanks(self, tmp_path):
        path = tmp_path / "s.tsv"
        path.write_text("# header\n\nS a\tb\n", encoding="utf-8")
        assert load_pairs(path) == [("S a", "b")]

    def test_malformed_line_number_reported(self, tmp_path):
        path = tmp_path / "s.tsv"
        path.write_text("S a\tb\nbroken line\n", encoding="utf-8")
        with pytest.raises(SampleFormatError, match="line 2"):
            load_pairs(path)

    def test_longest_lengths(self):
        assert longest_lengths([("ab", "ā"), ("a", "xyzw")]) == (2, 4)


class TestBatches:
    def test_shapes_and_padding(self):
        src, tgt = make_batch([("S ab", "ab"), ("S a", "a")], 64, 64)
        assert src.shape[0] == 2 and tgt.shape[0] == 2
        assert tgt[:, 0].eq(BOS).all()
        assert src[1, -1].item() == PAD  # shorter row padded

    def test_iterator_deterministic(self):
        pairs = [(f"S w{i}", f"w{i}") for i in range(10)]
        first = batch_iterator(pairs, 3, seed=5, max_source_len=32, max_target_len=32)
        second = batch_iterator(pairs, 3, seed=5, max_source_len=32, max_target_len=32)
        for _ in range(7):
            a_src, a_tgt = next(first)
            b_src, b_tgt = next(second)
            assert torch.equal(a_src, b_src) and torch.equal(a_tgt, b_tgt)
