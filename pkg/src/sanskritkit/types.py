"""Shared domain model: tokens, sentences, paragraphs, morph tags, task samples.

Everything here is immutable after construction and safe to share across
workers. No I/O happens in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union


class ValidationError(ValueError):
    """Raised when a domain object violates one of its invariants."""


TASK_ORDER = "SLM"
OCR_TASK = "O"

# Characters that would break the canonical tag rendering.
_TAG_RESERVED = {"|", "="}


def _as_feature_pairs(
    features: Union["MorphTag", Mapping[str, str], Iterable[tuple[str, str]], None],
) -> tuple[tuple[str, str], ...]:
    if features is None:
        return ()
    if isinstance(features, MorphTag):
        return features.features
    if isinstance(features, Mapping):
        pairs = list(features.items())
    else:
        pairs = list(features)
    seen = set()
    for key, value in pairs:
        if not key:
            raise ValidationError("empty feature key")
        if key in seen:
            raise ValidationError(f"duplicate feature key: {key!r}")
        if any(c in key for c in _TAG_RESERVED) or "|" in value:
            raise ValidationError(f"reserved character in feature {key}={value}")
        seen.add(key)
    return tuple(sorted(pairs))


@dataclass(frozen=True)
class MorphTag:
    """Ordered bundle of morphosyntactic features.

    Features are (key, value) pairs held in canonical (lexicographic by key)
    order. A value may be empty, in which case the feature renders as the
    bare key; this is used for sentinel tags such as MANTRA.
    """

    features: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", _as_feature_pairs(self.features))

    @classmethod
    def parse(cls, text: str) -> "MorphTag":
        """Parse a rendered tag string such as ``Case=Nom|Number=Sing``."""
        text = text.strip()
        if text in ("", "_"):
            return cls(())
        pairs = []
        for chunk in text.split("|"):
            if "=" in chunk:
                key, _, value = chunk.partition("=")
            else:
                key, value = chunk, ""
            pairs.append((key, value))
        return cls(tuple(pairs))

    def render(self) -> str:
        if not self.features:
            return "_"
        return "|".join(k if v == "" else f"{k}={v}" for k, v in self.features)

    def __str__(self) -> str:
        return self.render()

    def __bool__(self) -> bool:
        return bool(self.features)


EMPTY_TAG = MorphTag(())

# Sentinel replacing POS/morph information of old Vedic citations.
MANTRA_LABEL = "MANTRA"
MANTRA_TAG = MorphTag(((MANTRA_LABEL, ""),))


def canonical_tag_string(
    tag: Union[MorphTag, Mapping[str, str], Iterable[tuple[str, str]]],
) -> str:
    """Deterministic rendering of a feature bundle.

    Keys are sorted lexicographically and joined with ``|``; the empty
    feature set renders as ``_``. Duplicate keys raise ValidationError.
    """
    if not isinstance(tag, MorphTag):
        tag = MorphTag(_as_feature_pairs(tag))
    return tag.render()


@dataclass(frozen=True)
class Token:
    """One annotated word of a sentence.

    ``surface_sandhied`` is the form as merged in running text and may be
    empty when the word fused into a neighbour. ``head`` uses the CoNLL-U
    convention: 0 means root, None means no dependency annotation.
    """

    index: int
    form: str
    surface_sandhied: str = ""
    lemma: str = ""
    morph: MorphTag = EMPTY_TAG
    upos: str = ""
    head: Optional[int] = None
    deprel: Optional[str] = None
    reconstructed: bool = False

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValidationError(f"token index must be >= 1, got {self.index}")
        if not self.form:
            raise ValidationError(f"token {self.index} has empty form")
        if self.head is not None and self.head == self.index:
            raise ValidationError(f"token {self.index} is its own head")


@dataclass(frozen=True)
class Sentence:
    """Ordered token sequence with corpus metadata."""

    tokens: tuple[Token, ...]
    text_id: str = ""
    category: str = ""
    raw_text: str = ""
    is_mantra: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        n = len(self.tokens)
        for pos, token in enumerate(self.tokens, start=1):
            if token.index != pos:
                raise ValidationError(
                    f"token indices must be 1..{n} consecutive; "
                    f"found {token.index} at position {pos}"
                )
            if token.head is not None and not 0 <= token.head <= n:
                raise ValidationError(
                    f"token {token.index} head {token.head} out of range 0..{n}"
                )

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    @property
    def has_heads(self) -> bool:
        return bool(self.tokens) and all(t.head is not None for t in self.tokens)

    @property
    def has_reconstructed(self) -> bool:
        return any(t.reconstructed for t in self.tokens)

    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]


@dataclass(frozen=True)
class Paragraph:
    """Corpus-contiguous sentence run packed under a character budget."""

    sentences: tuple[Sentence, ...]
    char_len: int = field(init=False)

    def __post_init__(self) -> None:
        sentences = tuple(self.sentences)
        if not sentences:
            raise ValidationError("paragraph needs at least one sentence")
        object.__setattr__(self, "sentences", sentences)
        object.__setattr__(self, "char_len", len(self.raw_text))

    @property
    def raw_text(self) -> str:
        return " ".join(s.raw_text for s in self.sentences)

    @property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(t for s in self.sentences for t in s.tokens)

    @property
    def is_mantra(self) -> bool:
        return any(s.is_mantra for s in self.sentences)

    @property
    def has_reconstructed(self) -> bool:
        return any(s.has_reconstructed for s in self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)


def task_prefix(tasks: Sequence[str]) -> str:
    """Canonical prefix letters for a task combination (S < L < M; O alone)."""
    tasks = tuple(tasks)
    if tasks == (OCR_TASK,):
        return OCR_TASK
    if not tasks or any(t not in TASK_ORDER for t in tasks):
        raise ValidationError(f"invalid task set {tasks!r}")
    if len(set(tasks)) != len(tasks):
        raise ValidationError(f"duplicate task letters in {tasks!r}")
    return "".join(t for t in TASK_ORDER if t in tasks)


@dataclass(frozen=True)
class TaskSample:
    """One (source, target) pair, prefixed with its task letters."""

    tasks: tuple[str, ...]
    source: str
    target: str
    reconstructed_flag: bool = False

    def __post_init__(self) -> None:
        prefix = task_prefix(self.tasks)
        object.__setattr__(self, "tasks", tuple(prefix))
        expected = ("R " if self.reconstructed_flag else "") + prefix + " "
        if not self.source.startswith(expected):
            raise ValidationError(
                f"source must begin with {expected!r}, got {self.source[:16]!r}"
            )

    @property
    def prefix(self) -> str:
        return "".join(self.tasks)


@dataclass(frozen=True)
class TreeReport:
    """Outcome of checking a sentence's head graph."""

    acyclic: bool
    single_root: bool
    connected: bool
    notes: tuple[str, ...] = ()

    @property
    def passes(self) -> bool:
        return self.acyclic and self.single_root and self.connected


def validate_tree(sentence: Sentence) -> TreeReport:
    """Check that the head graph is a single tree rooted at 0.

    All heads must be present. The report carries individual failures;
    ``passes`` is true iff the graph is acyclic, connected to the root,
    and has exactly one token attached to 0 (the UD convention).
    """
    if not sentence.has_heads:
        raise ValidationError("validate_tree requires all heads present")
    heads = {t.index: t.head for t in sentence.tokens}
    roots = [i for i, h in heads.items() if h == 0]
    notes = []
    if len(roots) != 1:
        notes.append(f"expected one root, found {len(roots)}")

    reaches_root: dict[int, bool] = {}
    acyclic = True
    for start in heads:
        path = []
        node = start
        while node != 0 and node not in reaches_root and node not in path:
            path.append(node)
            node = heads[node]
        if node == 0:
            ok = True
        elif node in reaches_root:
            ok = reaches_root[node]
        else:
            ok = False
            acyclic = False
            notes.append(f"cycle through token {node}")
        for visited in path:
            reaches_root[visited] = ok

    connected = all(reaches_root.values()) if reaches_root else True
    if not connected and acyclic:
        notes.append("tokens unreachable from root")
    return TreeReport(
        acyclic=acyclic,
        single_root=len(roots) == 1,
        connected=connected,
        notes=tuple(notes),
    )
