"""Input validation helpers shared across modules."""

from __future__ import annotations

import unicodedata
from typing import Sequence

from .types import ValidationError


def check_aligned(pred: Sequence, ref: Sequence, what: str = "sequences") -> None:
    """Raise unless both sequences have equal length."""
    if len(pred) != len(ref):
        raise ValidationError(
            f"{what} must align: {len(pred)} predictions vs {len(ref)} references"
        )


def check_no_tabs(text: str, where: str = "text") -> None:
    """Tabs are the TSV field separator and are forbidden in corpus text."""
    if "\t" in text:
        raise ValidationError(f"tab character in {where}: {text[:40]!r}")


def check_nonempty(seq: Sequence, what: str = "input") -> None:
    if len(seq) == 0:
        raise ValidationError(f"{what} is empty")


def nfc(text: str) -> str:
    """Normalize to NFC; all IAST I/O goes through this."""
    return unicodedata.normalize("NFC", text)


def collapse_spaces(text: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return " ".join(text.split())
