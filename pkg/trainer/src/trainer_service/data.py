"""Sample-file loading and batch assembly.

Reads the toolkit's TSV sample format (source<TAB>target, '#' comments)
without importing the producing package; the file format is the contract.
"""

from __future__ import annotations

import random
from pathlib import Path

import torch

from .vocab import BOS, PAD, encode


class SampleFormatError(ValueError):
    pass


def load_pairs(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise SampleFormatError(
                    f"{path}: line {lineno}: expected 2 tab-separated columns, "
                    f"got {len(parts)}"
                )
            pairs.append((parts[0], parts[1]))
    return pairs


def longest_lengths(pairs: list[tuple[str, str]]) -> tuple[int, int]:
    source = max((len(s.encode("utf-8")) for s, _ in pairs), default=0)
    target = max((len(t.encode("utf-8")) for _, t in pairs), default=0)
    return source, target


def _pad_batch(rows: list[list[int]]) -> torch.Tensor:
    width = max(len(r) for r in rows)
    out = torch.full((len(rows), width), PAD, dtype=torch.long)
    for i, row in enumerate(rows):
        out[i, : len(row)] = torch.tensor(row, dtype=torch.long)
    return out


def make_batch(
    pairs: list[tuple[str, str]], max_source_len: int, max_target_len: int
) -> tuple[torch.Tensor, torch.Tensor]:
    """(src, tgt) id tensors; tgt rows start with BOS for teacher forcing."""
    sources = [encode(s, max_source_len) for s, _ in pairs]
    targets = [[BOS] + encode(t, max_target_len) for _, t in pairs]
    return _pad_batch(sources), _pad_batch(targets)


def batch_iterator(
    pairs: list[tuple[str, str]],
    batch_size: int,
    seed: int,
    max_source_len: int,
    max_target_len: int,
):
    """Endless shuffled batches, deterministic under the seed."""
    rng = random.Random(seed)
    order = list(range(len(pairs)))
    while True:
        rng.shuffle(order)
        for start in range(0, len(order), batch_size):
            chosen = [pairs[i] for i in order[start : start + batch_size]]
            if chosen:
                yield make_batch(chosen, max_source_len, max_target_len)
