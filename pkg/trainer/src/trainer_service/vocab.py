"""Byte-level vocabulary: raw UTF-8 bytes plus PAD/BOS/EOS specials."""

from __future__ import annotations

PAD = 0
BOS = 1
EOS = 2
OFFSET = 3
VOCAB_SIZE = 256 + OFFSET


def encode(text: str, max_len: int | None = None) -> list[int]:
    """Text -> byte ids, truncated to max_len payload bytes, EOS-terminated."""
    payload = text.encode("utf-8")
    if max_len is not None:
        payload = payload[:max_len]
    return [b + OFFSET for b in payload] + [EOS]


def decode(ids: list[int]) -> str:
    """Byte ids -> text; stops at EOS, ignores specials, replaces bad UTF-8."""
    payload = bytearray()
    for i in ids:
        if i == EOS:
            break
        if i >= OFFSET:
            payload.append(i - OFFSET)
    return payload.decode("utf-8", errors="replace")
