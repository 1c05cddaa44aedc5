"""Bijective compression of morphosyntactic tag strings into short codes.

Codes are built from characters that IAST Sanskrit never uses, so encoded
tags can sit next to corpus text inside one target string without any
escaping. Code assignment is frequency-ordered and deterministic, which
replaces the hand-built mapping with a reproducible construction; the
codebook file stays hand-editable.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from itertools import islice, product
from pathlib import Path
from typing import Iterable, Mapping, Union

from sklearn.base import BaseEstimator, TransformerMixin

from .types import MorphTag, ValidationError, canonical_tag_string
from .validation import check_nonempty

DEFAULT_RESERVED_ALPHABET = "fqwxzFQWXZ"
MAX_CODE_LEN = 4

TagLike = Union[str, MorphTag, Mapping[str, str]]


class UnknownTagError(KeyError):
    def __init__(self, tag: str):
        super().__init__(tag)
        self.tag = tag

    def __str__(self) -> str:
        return f"tag not in codebook: {self.tag!r}"


class UnknownCodeError(KeyError):
    def __init__(self, code: str):
        super().__init__(code)
        self.code = code

    def __str__(self) -> str:
        return f"code not in codebook: {self.code!r}"


class CapacityError(ValidationError):
    pass


def _canonical(tag: TagLike) -> str:
    if isinstance(tag, str):
        return tag
    return canonical_tag_string(tag)


def _content_hash(entries: Iterable[tuple[str, str]], alphabet: str) -> str:
    digest = hashlib.sha256()
    digest.update(alphabet.encode("utf-8"))
    for code, tag in entries:
        digest.update(f"\n{code}\t{tag}".encode("utf-8"))
    return digest.hexdigest()[:12]


@dataclass(frozen=True)
class Codebook:
    """Bijective tag <-> code mapping over a reserved alphabet."""

    entries: tuple[tuple[str, str], ...]  # (code, canonical tag), rank order
    reserved_alphabet: str = DEFAULT_RESERVED_ALPHABET
    version: str = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        allowed = set(self.reserved_alphabet)
        codes = set()
        tags = set()
        for code, tag in self.entries:
            if not code or len(code) > MAX_CODE_LEN:
                raise ValidationError(f"code {code!r} violates length bound")
            if not set(code) <= allowed:
                raise ValidationError(
                    f"code {code!r} uses characters outside the reserved alphabet"
                )
            if code in codes:
                raise ValidationError(f"duplicate code {code!r}")
            if tag in tags:
                raise ValidationError(f"duplicate tag {tag!r}")
            codes.add(code)
            tags.add(tag)
        object.__setattr__(
            self, "version", _content_hash(self.entries, self.reserved_alphabet)
        )
        object.__setattr__(self, "_code_to_tag", dict(self.entries))
        object.__setattr__(self, "_tag_to_code", {t: c for c, t in self.entries})

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, tag: str) -> bool:
        return tag in self._tag_to_code

    def code_for(self, tag: TagLike) -> str:
        canonical = _canonical(tag)
        try:
            return self._tag_to_code[canonical]
        except KeyError:
            raise UnknownTagError(canonical) from None

    def tag_for(self, code: str) -> str:
        try:
            return self._code_to_tag[code]
        except KeyError:
            raise UnknownCodeError(code) from None


def _code_stream(alphabet: str):
    for length in range(1, MAX_CODE_LEN + 1):
        for combo in product(alphabet, repeat=length):
            yield "".join(combo)


def build_codebook(
    tag_frequencies: Mapping[str, int],
    reserved_alphabet: str = DEFAULT_RESERVED_ALPHABET,
) -> Codebook:
    """Assign codes by descending frequency, shortest codes first.

    Ties break on the canonical tag string so the same input always yields
    a byte-identical codebook.
    """
    if len(set(reserved_alphabet)) != len(reserved_alphabet) or not reserved_alphabet:
        raise ValidationError("reserved alphabet must be non-empty without repeats")
    ranked = sorted(tag_frequencies.items(), key=lambda kv: (-kv[1], kv[0]))
    capacity = sum(len(reserved_alphabet) ** k for k in range(1, MAX_CODE_LEN + 1))
    if len(ranked) > capacity:
        raise CapacityError(
            f"{len(ranked)} tags exceed codebook capacity {capacity} "
            f"(alphabet size {len(reserved_alphabet)}, max code length {MAX_CODE_LEN})"
        )
    codes = islice(_code_stream(reserved_alphabet), len(ranked))
    return Codebook(
        entries=tuple((code, tag) for code, (tag, _) in zip(codes, ranked)),
        reserved_alphabet=reserved_alphabet,
    )


def count_tags(tags: Iterable[TagLike]) -> Counter:
    return Counter(_canonical(t) for t in tags)


def encode_tag(tag: TagLike, codebook: Codebook) -> str:
    return codebook.code_for(tag)


def decode_code(code: str, codebook: Codebook) -> str:
    return codebook.tag_for(code)


def compression_ratio(corpus_tags: Iterable[TagLike], codebook: Codebook) -> float:
    """Token-frequency-weighted (code chars) / (canonical tag chars)."""
    code_chars = 0
    tag_chars = 0
    for tag in corpus_tags:
        canonical = _canonical(tag)
        code_chars += len(codebook.code_for(canonical))
        tag_chars += len(canonical)
    if tag_chars == 0:
        raise ValidationError("compression ratio over an empty corpus is undefined")
    return code_chars / tag_chars


def scan_reserved(lines: Iterable[str], alphabet: str = DEFAULT_RESERVED_ALPHABET):
    """Yield (line_number, column, char) for reserved characters in text."""
    reserved = set(alphabet)
    for lineno, line in enumerate(lines, start=1):
        for col, char in enumerate(line):
            if char in reserved:
                yield (lineno, col, char)


def assert_reserved_safe(
    lines: Iterable[str], alphabet: str = DEFAULT_RESERVED_ALPHABET
) -> int:
    """Hard gate: raise if corpus text contains any reserved character.

    Returns the number of lines scanned.
    """
    count = 0
    hits = []
    reserved = set(alphabet)
    for lineno, line in enumerate(lines, start=1):
        count = lineno
        for col, char in enumerate(line):
            if char in reserved:
                hits.append((lineno, col, char))
                if len(hits) >= 5:
                    break
        if len(hits) >= 5:
            break
    if hits:
        locations = ", ".join(f"line {l} col {c} ({ch!r})" for l, c, ch in hits)
        raise ValidationError(
            f"reserved alphabet characters found in corpus text: {locations}"
        )
    return count


def write_codebook(codebook: Codebook, path: Union[str, Path]) -> None:
    lines = [
        f"# codebook-version: {codebook.version}",
        f"# reserved-alphabet: {codebook.reserved_alphabet}",
    ]
    lines.extend(f"{code}\t{tag}" for code, tag in codebook.entries)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_codebook(path: Union[str, Path]) -> Codebook:
    """Load a codebook file; the version is recomputed from content so the
    file can be hand-edited."""
    alphabet = DEFAULT_RESERVED_ALPHABET
    entries = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if line.startswith("# reserved-alphabet:"):
            alphabet = line.split(":", 1)[1].strip()
            continue
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(
                f"codebook line {lineno}: expected 2 columns, got {len(parts)}"
            )
        entries.append((parts[0], parts[1]))
    return Codebook(entries=tuple(entries), reserved_alphabet=alphabet)


class TagCodec(BaseEstimator, TransformerMixin):
    """sklearn-style wrapper: fit builds the codebook from observed tags."""

    def __init__(self, reserved_alphabet: str = DEFAULT_RESERVED_ALPHABET):
        self.reserved_alphabet = reserved_alphabet

    def fit(self, X: Iterable[TagLike], y=None):
        frequencies = count_tags(X)
        check_nonempty(frequencies, "tag inventory")
        self.codebook_ = build_codebook(frequencies, self.reserved_alphabet)
        return self

    def transform(self, X: Iterable[TagLike]) -> list[str]:
        return [self.codebook_.code_for(t) for t in X]

    def inverse_transform(self, X: Iterable[str]) -> list[str]:
        return [self.codebook_.tag_for(c) for c in X]
