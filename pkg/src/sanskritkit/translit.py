"""Lossless transliteration between Devanagari, IAST, and SLP1.

The grapheme correspondences live in a TSV data file (one row per sound);
this module contributes the script structure: longest-match tokenization
for the Latin schemes and inherent-vowel/virāma handling for Devanagari.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from sklearn.base import BaseEstimator, TransformerMixin

from .types import ValidationError
from .validation import nfc


class Script(Enum):
    DEVANAGARI = "devanagari"
    IAST = "iast"
    SLP1 = "slp1"

    @classmethod
    def coerce(cls, value: Union["Script", str]) -> "Script":
        if isinstance(value, Script):
            return value
        return cls(value.strip().lower())


class TransliterationError(ValidationError):
    """Unmappable input; ``offset`` indexes the offending codepoint (NFC)."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


# Devanagari structure: these are properties of the script, not of any
# particular romanization, so they stay in code rather than in the table.
_VIRAMA = "्"
_SIGN_TO_VOWEL = {
    "ा": "आ",  # ā
    "ि": "इ",  # i
    "ी": "ई",  # ī
    "ु": "उ",  # u
    "ू": "ऊ",  # ū
    "ृ": "ऋ",  # ṛ
    "ॄ": "ॠ",  # ṝ
    "ॢ": "ऌ",  # ḷ
    "ॣ": "ॡ",  # ḹ
    "े": "ए",  # e
    "ै": "ऐ",  # ai
    "ो": "ओ",  # o
    "ौ": "औ",  # au
}
_VOWEL_TO_SIGN = {v: k for k, v in _SIGN_TO_VOWEL.items()}
_INHERENT_VOWEL = "अ"  # a

_KIND_VOWEL = "vowel"
_KIND_CONSONANT = "consonant"
_KIND_MARK = "mark"
_KIND_SYMBOL = "symbol"  # avagraha, daṇḍa


def _classify(deva: str) -> str:
    cp = ord(deva[0])
    if 0x0904 <= cp <= 0x0914 or cp in (0x0960, 0x0961):
        return _KIND_VOWEL
    if 0x0915 <= cp <= 0x0939:
        return _KIND_CONSONANT
    if 0x0901 <= cp <= 0x0903:
        return _KIND_MARK
    return _KIND_SYMBOL


def _is_indic_block(cp: int) -> bool:
    return (
        0x0900 <= cp <= 0x097F
        or 0x1CD0 <= cp <= 0x1CFF
        or 0xA8E0 <= cp <= 0xA8FF
    )


def _is_vedic_accent(cp: int) -> bool:
    return cp in (0x0951, 0x0952) or 0x1CD0 <= cp <= 0x1CFF or 0xA8E0 <= cp <= 0xA8FF


@dataclass(frozen=True)
class TableRow:
    deva: str
    iast: str
    slp1: str
    kind: str


@dataclass(frozen=True)
class _Unit:
    """One parsed grapheme: a table row, or a passthrough character."""

    row: Optional[TableRow]
    char: str = ""

    @property
    def kind(self) -> str:
        return self.row.kind if self.row else "other"


class TranslitTable:
    """Loaded master table plus per-script lookup structures."""

    def __init__(self, rows: Iterable[TableRow]):
        self.rows = tuple(rows)
        self._by_deva = {r.deva: r for r in self.rows}
        self._latin_tokens = {
            Script.IAST: self._build_latin_index("iast"),
            Script.SLP1: self._build_latin_index("slp1"),
        }

    def _build_latin_index(self, column: str):
        index: dict[str, TableRow] = {}
        for row in self.rows:
            token = getattr(row, column)
            if token in index:
                raise ValidationError(
                    f"duplicate {column} token {token!r} in transliteration table"
                )
            index[token] = row
        lengths = sorted({len(t) for t in index}, reverse=True)
        return index, lengths

    def row_for_deva(self, char: str) -> Optional[TableRow]:
        return self._by_deva.get(char)

    def latin_index(self, script: Script):
        return self._latin_tokens[script]


def load_master_table(path: Optional[Union[str, Path]] = None) -> TranslitTable:
    """Load the grapheme table; defaults to the packaged master table."""
    if path is None:
        source = resources.files("sanskritkit.data").joinpath("translit_master.tsv")
        text = source.read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValidationError(
                f"transliteration table line {lineno}: expected 3 columns, got {len(parts)}"
            )
        deva, iast, slp1 = (nfc(p) for p in parts)
        rows.append(TableRow(deva=deva, iast=iast, slp1=slp1, kind=_classify(deva)))
    return TranslitTable(rows)


_DEFAULT_TABLE: Optional[TranslitTable] = None


def default_table() -> TranslitTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_master_table()
    return _DEFAULT_TABLE


def _parse_latin(text: str, script: Script, table: TranslitTable) -> list[_Unit]:
    index, lengths = table.latin_index(script)
    units: list[_Unit] = []
    i = 0
    n = len(text)
    while i < n:
        matched = None
        for length in lengths:
            candidate = text[i : i + length]
            if candidate in index:
                matched = index[candidate]
                i += length
                break
        if matched is not None:
            units.append(_Unit(row=matched))
            continue
        ch = text[i]
        if _is_indic_block(ord(ch)):
            raise TransliterationError(
                f"{script.value} input contains Indic codepoint {ch!r}", i
            )
        units.append(_Unit(row=None, char=ch))
        i += 1
    return units


def _parse_devanagari(text: str, table: TranslitTable) -> list[_Unit]:
    units: list[_Unit] = []
    pending: Optional[TableRow] = None
    inherent = table.row_for_deva(_INHERENT_VOWEL)

    def flush(with_inherent: bool = True) -> None:
        nonlocal pending
        if pending is not None:
            units.append(_Unit(row=pending))
            if with_inherent:
                units.append(_Unit(row=inherent))
            pending = None

    for offset, ch in enumerate(text):
        cp = ord(ch)
        if ch == _VIRAMA:
            if pending is None:
                raise TransliterationError("virāma without consonant", offset)
            flush(with_inherent=False)
            continue
        if ch in _SIGN_TO_VOWEL:
            if pending is None:
                raise TransliterationError(f"vowel sign {ch!r} without consonant", offset)
            consonant = pending
            pending = None
            units.append(_Unit(row=consonant))
            units.append(_Unit(row=table.row_for_deva(_SIGN_TO_VOWEL[ch])))
            continue
        row = table.row_for_deva(ch)
        if row is not None:
            if row.kind == _KIND_CONSONANT:
                flush()
                pending = row
            else:
                flush()
                units.append(_Unit(row=row))
            continue
        if _is_vedic_accent(cp) or not _is_indic_block(cp) or ch.isdigit():
            flush()
            units.append(_Unit(row=None, char=ch))
            continue
        raise TransliterationError(f"unmappable Devanagari codepoint {ch!r}", offset)
    flush()
    return units


def _render_latin(units: list[_Unit], script: Script) -> str:
    column = "iast" if script is Script.IAST else "slp1"
    return "".join(
        getattr(u.row, column) if u.row is not None else u.char for u in units
    )


def _render_devanagari(units: list[_Unit], table: TranslitTable) -> str:
    out: list[str] = []
    i = 0
    n = len(units)
    while i < n:
        unit = units[i]
        if unit.row is None:
            out.append(unit.char)
            i += 1
            continue
        if unit.kind == _KIND_CONSONANT:
            out.append(unit.row.deva)
            nxt = units[i + 1] if i + 1 < n else None
            if nxt is not None and nxt.row is not None and nxt.kind == _KIND_VOWEL:
                if nxt.row.deva != _INHERENT_VOWEL:
                    out.append(_VOWEL_TO_SIGN[nxt.row.deva])
                i += 2
                continue
            out.append(_VIRAMA)
            i += 1
            continue
        out.append(unit.row.deva)
        i += 1
    return "".join(out)


def transliterate(
    text: str,
    source: Union[Script, str],
    target: Union[Script, str],
    table: Optional[TranslitTable] = None,
) -> str:
    """Convert ``text`` from one script to another.

    Characters outside the source repertoire (digits, punctuation,
    whitespace, Latin text embedded in Devanagari) pass through unchanged.
    Codepoints of a conflicting Indic script, or dangling Devanagari
    combining signs, raise TransliterationError with the offset.
    """
    source = Script.coerce(source)
    target = Script.coerce(target)
    table = table or default_table()
    text = nfc(text)
    if source is target:
        return text
    if source is Script.DEVANAGARI:
        units = _parse_devanagari(text, table)
    else:
        units = _parse_latin(text, source, table)
    if target is Script.DEVANAGARI:
        return nfc(_render_devanagari(units, table))
    return nfc(_render_latin(units, target))


@dataclass(frozen=True)
class ByteStats:
    chars: int
    utf8_bytes: int


def byte_stats(text: str, script: Union[Script, str] = Script.IAST) -> ByteStats:
    """Codepoint and UTF-8 byte counts after NFC normalization."""
    Script.coerce(script)
    text = nfc(text)
    return ByteStats(chars=len(text), utf8_bytes=len(text.encode("utf-8")))


class Transliterator(BaseEstimator, TransformerMixin):
    """Stateless sklearn-style transformer over sequences of strings."""

    def __init__(self, source: str = "devanagari", target: str = "iast",
                 table_path: Optional[str] = None):
        self.source = source
        self.target = target
        self.table_path = table_path

    def fit(self, X=None, y=None):
        self.table_ = load_master_table(self.table_path)
        return self

    def transform(self, X: Iterable[str]) -> list[str]:
        if not hasattr(self, "table_"):
            self.fit()
        return [
            transliterate(line, self.source, self.target, table=self.table_)
            for line in X
        ]

    def inverse_transform(self, X: Iterable[str]) -> list[str]:
        if not hasattr(self, "table_"):
            self.fit()
        return [
            transliterate(line, self.target, self.source, table=self.table_)
            for line in X
        ]
