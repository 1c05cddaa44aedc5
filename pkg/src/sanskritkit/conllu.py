"""CoNLL-U reading/writing with DCS conventions, plus corpus splits.

The reader understands two corpus-specific conventions, both carried in
standard CoNLL-U slots so files stay tool-compatible: the unsandhied form
and the reconstructed marker live in MISC, mantra marking in a sentence
comment. The exact MISC key names the DCS export uses are configurable
because they must be confirmed against the published dump.
"""

from __future__ import annotations

import io
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional, Sequence, TextIO, Union

from .types import MorphTag, Sentence, Token, ValidationError

Source = Union[str, Path, TextIO]


@dataclass(frozen=True)
class ReaderConfig:
    unsandhied_key: str = "Unsandhied"
    reconstructed_key: str = "Reconstructed"
    mantra_comment_key: str = "mantra"
    skip_compound_lines: bool = True  # multiword ranges and empty nodes


@dataclass
class ReadStats:
    sentences: int = 0
    tokens: int = 0
    skipped_lines: int = 0


_TRUE_VALUES = {"yes", "true", "1"}


def _open(source: Source) -> tuple[TextIO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8"), True
    return source, False


def _parse_misc(text: str) -> dict[str, str]:
    misc = {}
    if text and text != "_":
        for item in text.split("|"):
            key, _, value = item.partition("=")
            misc[key] = value
    return misc


def _build_sentence(
    comments: list[tuple[str, str]],
    rows: list[tuple[int, list[str]]],
    config: ReaderConfig,
) -> Sentence:
    meta = dict(comments)
    tokens = []
    for lineno, cols in rows:
        try:
            index = int(cols[0])
        except ValueError:
            raise ValidationError(f"line {lineno}: non-integer token id {cols[0]!r}")
        head_col = cols[6]
        if head_col == "_":
            head = None
        else:
            try:
                head = int(head_col)
            except ValueError:
                raise ValidationError(f"line {lineno}: non-integer head {head_col!r}")
        misc = _parse_misc(cols[9])
        surface = "" if cols[1] == "_" else cols[1]
        form = misc.get(config.unsandhied_key, surface)
        if not form:
            raise ValidationError(f"line {lineno}: token has no usable form")
        tokens.append(
            Token(
                index=index,
                form=form,
                surface_sandhied=surface,
                lemma="" if cols[2] == "_" else cols[2],
                upos="" if cols[3] == "_" else cols[3],
                morph=MorphTag.parse(cols[5]),
                head=head,
                deprel=None if cols[7] == "_" else cols[7],
                reconstructed=misc.get(config.reconstructed_key, "").lower()
                in _TRUE_VALUES,
            )
        )
    return Sentence(
        tokens=tuple(tokens),
        text_id=meta.get("text_id", meta.get("sent_id", "")),
        category=meta.get("category", ""),
        raw_text=meta.get("text", ""),
        is_mantra=meta.get(config.mantra_comment_key, "").lower() in _TRUE_VALUES,
    )


def read_conllu(
    source: Source,
    config: Optional[ReaderConfig] = None,
    stats: Optional[ReadStats] = None,
) -> Iterator[Sentence]:
    """Stream sentences from a CoNLL-U file or text stream."""
    config = config or ReaderConfig()
    stream, owned = _open(source)
    try:
        comments: list[tuple[str, str]] = []
        rows: list[tuple[int, list[str]]] = []
        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if rows:
                    sentence = _build_sentence(comments, rows, config)
                    if stats:
                        stats.sentences += 1
                        stats.tokens += len(sentence)
                    yield sentence
                comments, rows = [], []
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].partition("=")
                if sep:
                    comments.append((key.strip(), value.strip()))
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise ValidationError(
                    f"line {lineno}: expected 10 columns, got {len(cols)}"
                )
            token_id = cols[0]
            if "-" in token_id or "." in token_id:
                if config.skip_compound_lines:
                    if stats:
                        stats.skipped_lines += 1
                    continue
                raise ValidationError(
                    f"line {lineno}: compound/empty-node id {token_id!r} not supported"
                )
            rows.append((lineno, cols))
        if rows:
            sentence = _build_sentence(comments, rows, config)
            if stats:
                stats.sentences += 1
                stats.tokens += len(sentence)
            yield sentence
    finally:
        if owned:
            stream.close()


def _render_misc(token: Token, config: ReaderConfig) -> str:
    items = []
    if token.form != token.surface_sandhied:
        items.append(f"{config.unsandhied_key}={token.form}")
    if token.reconstructed:
        items.append(f"{config.reconstructed_key}=Yes")
    return "|".join(items) if items else "_"


def write_conllu(
    sentences: Iterable[Sentence],
    target: Optional[Source] = None,
    config: Optional[ReaderConfig] = None,
) -> str:
    """Serialize sentences; read_conllu(write_conllu(x)) == x."""
    config = config or ReaderConfig()
    chunks = []
    for sentence in sentences:
        lines = []
        if sentence.text_id:
            lines.append(f"# text_id = {sentence.text_id}")
        if sentence.category:
            lines.append(f"# category = {sentence.category}")
        if sentence.raw_text:
            lines.append(f"# text = {sentence.raw_text}")
        if sentence.is_mantra:
            lines.append(f"# {config.mantra_comment_key} = yes")
        for t in sentence.tokens:
            lines.append(
                "\t".join(
                    [
                        str(t.index),
                        t.surface_sandhied or "_",
                        t.lemma or "_",
                        t.upos or "_",
                        "_",
                        t.morph.render(),
                        "_" if t.head is None else str(t.head),
                        t.deprel or "_",
                        "_",
                        _render_misc(t, config),
                    ]
                )
            )
        chunks.append("\n".join(lines) + "\n\n")
    text = "".join(chunks)
    if target is not None:
        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        else:
            target.write(text)
    return text


@dataclass(frozen=True)
class SplitManifest:
    """Exact record of which corpus positions went to dev and test."""

    seed: int
    dev_ordinals: tuple[int, ...]
    test_ordinals: tuple[int, ...]
    text_ids: tuple[str, ...] = ()  # aligned with dev_ordinals + test_ordinals

    def records(self) -> Iterator[tuple[str, str, int]]:
        ids = iter(self.text_ids) if self.text_ids else None
        for ordinal in self.dev_ordinals:
            yield ("dev", next(ids) if ids else "", ordinal)
        for ordinal in self.test_ordinals:
            yield ("test", next(ids) if ids else "", ordinal)


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[Sentence, ...]
    dev: tuple[Sentence, ...]
    test: tuple[Sentence, ...]
    manifest: SplitManifest

    def __iter__(self):
        return iter((self.train, self.dev, self.test))


def make_splits(
    sentences: Sequence[Sentence],
    dev_size: int,
    test_size: int,
    exclusions: Optional[Callable[[Sentence], bool]] = None,
    seed: int = 0,
) -> CorpusSplit:
    """Hold out dev/test from eligible sentences, preserving corpus order.

    Eligible means: no reconstructed token and not matched by the
    exclusions predicate. Selection is seeded sampling over eligible
    corpus positions; the manifest records the choice exactly.
    """
    sentences = list(sentences)
    if dev_size + test_size >= len(sentences):
        raise ValidationError(
            f"requested dev+test {dev_size + test_size} >= corpus size {len(sentences)}"
        )
    eligible = [
        i
        for i, s in enumerate(sentences)
        if not s.has_reconstructed and not (exclusions is not None and exclusions(s))
    ]
    needed = dev_size + test_size
    if len(eligible) < needed:
        raise ValidationError(
            f"only {len(eligible)} eligible sentences for {needed} held-out "
            f"(shortfall {needed - len(eligible)})"
        )
    rng = random.Random(seed)
    held = sorted(rng.sample(eligible, needed))
    assignment = rng.sample(held, dev_size)
    dev_ordinals = tuple(sorted(assignment))
    test_ordinals = tuple(sorted(set(held) - set(assignment)))
    manifest = SplitManifest(
        seed=seed,
        dev_ordinals=dev_ordinals,
        test_ordinals=test_ordinals,
        text_ids=tuple(
            sentences[i].text_id for i in dev_ordinals + test_ordinals
        ),
    )
    return apply_manifest(sentences, manifest)


def apply_manifest(
    sentences: Sequence[Sentence], manifest: SplitManifest
) -> CorpusSplit:
    """Reproduce a split from its manifest."""
    sentences = list(sentences)
    dev_set = set(manifest.dev_ordinals)
    test_set = set(manifest.test_ordinals)
    if dev_set & test_set:
        raise ValidationError("manifest assigns an ordinal to both dev and test")
    out_of_range = (dev_set | test_set) - set(range(len(sentences)))
    if out_of_range:
        raise ValidationError(
            f"manifest ordinals outside corpus: {sorted(out_of_range)[:5]}"
        )
    train = tuple(
        s for i, s in enumerate(sentences) if i not in dev_set and i not in test_set
    )
    dev = tuple(sentences[i] for i in manifest.dev_ordinals)
    test = tuple(sentences[i] for i in manifest.test_ordinals)
    return CorpusSplit(train=train, dev=dev, test=test, manifest=manifest)


def write_manifest(manifest: SplitManifest, target: Optional[Source] = None) -> str:
    lines = [
        f"# seed: {manifest.seed}",
        f"# dev: {len(manifest.dev_ordinals)}",
        f"# test: {len(manifest.test_ordinals)}",
    ]
    lines.extend(
        f"{split}\t{text_id}\t{ordinal}" for split, text_id, ordinal in manifest.records()
    )
    text = "\n".join(lines) + "\n"
    if target is not None:
        if isinstance(target, (str, Path)):
            Path(target).write_text(text, encoding="utf-8")
        else:
            target.write(text)
    return text


def read_manifest(source: Source) -> SplitManifest:
    stream, owned = _open(source)
    try:
        seed = 0
        dev: list[int] = []
        test: list[int] = []
        ids: list[str] = []
        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n")
            if line.startswith("# seed:"):
                seed = int(line.split(":", 1)[1].strip())
                continue
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValidationError(
                    f"manifest line {lineno}: expected 3 columns, got {len(parts)}"
                )
            split, text_id, ordinal = parts
            if split == "dev":
                dev.append(int(ordinal))
            elif split == "test":
                test.append(int(ordinal))
            else:
                raise ValidationError(f"manifest line {lineno}: unknown split {split!r}")
            ids.append(text_id)
        return SplitManifest(
            seed=seed,
            dev_ordinals=tuple(dev),
            test_ordinals=tuple(test),
            text_ids=tuple(ids),
        )
    finally:
        if owned:
            stream.close()


def read_conllu_string(text: str, config: Optional[ReaderConfig] = None) -> list[Sentence]:
    return list(read_conllu(io.StringIO(text), config))
