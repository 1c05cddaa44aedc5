"""Turn annotated sentences into multitask (source, target) samples.

Task letters: S segmentation, L lemmatization, M morphosyntactic tagging
(combined in the fixed order S < L < M), O for OCR post-correction pairs.
Paragraph granularity packs corpus-adjacent sentences under a character
budget so models can see cross-sentence context.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence, Union

from sklearn.base import BaseEstimator, TransformerMixin

from .sandhi import RuleTable, validate_segmentation
from .tagcodec import Codebook
from .types import (
    MANTRA_LABEL,
    MANTRA_TAG,
    Paragraph,
    Sentence,
    TaskSample,
    Token,
    ValidationError,
    task_prefix,
)
from .validation import check_no_tabs

Unit = Union[Sentence, Paragraph]

DEFAULT_PARAGRAPH_BUDGET = 512
DEFAULT_JOINER = "_"


@dataclass(frozen=True)
class TaskSpec:
    """What to generate: task combination, unit granularity, flags."""

    tasks: tuple[str, ...] = ("S",)
    granularity: str = "sentence"  # sentence | paragraph
    include_reconstructed: bool = True
    joiner: str = DEFAULT_JOINER

    def __post_init__(self) -> None:
        object.__setattr__(self, "tasks", tuple(task_prefix(self.tasks)))
        if self.granularity not in ("sentence", "paragraph"):
            raise ValidationError(f"unknown granularity {self.granularity!r}")
        if len(self.joiner) != 1 or self.joiner.isspace():
            raise ValidationError("joiner must be a single non-space character")

    @property
    def prefix(self) -> str:
        return "".join(self.tasks)


def build_paragraphs(
    sentences: Iterable[Sentence], budget: int = DEFAULT_PARAGRAPH_BUDGET
) -> list[Paragraph]:
    """Greedy left-to-right packing of adjacent sentences.

    A sentence starts a new paragraph when adding it would exceed the
    budget or when the document (text_id) changes; a single oversized
    sentence forms a singleton paragraph.
    """
    paragraphs: list[Paragraph] = []
    current: list[Sentence] = []
    current_len = 0
    for sentence in sentences:
        extra = len(sentence.raw_text)
        fits = current_len + 1 + extra <= budget
        same_doc = bool(current) and current[-1].text_id == sentence.text_id
        if current and same_doc and fits:
            current.append(sentence)
            current_len += 1 + extra
        else:
            if current:
                paragraphs.append(Paragraph(tuple(current)))
            current = [sentence]
            current_len = extra
    if current:
        paragraphs.append(Paragraph(tuple(current)))
    return paragraphs


def _unit_tokens(unit: Unit) -> tuple[Token, ...]:
    return unit.tokens if isinstance(unit, Paragraph) else tuple(unit.tokens)


def _token_unit(token: Token, spec: TaskSpec, codebook: Optional[Codebook]) -> str:
    fields = []
    if "S" in spec.tasks:
        fields.append(token.form)
    if "L" in spec.tasks:
        if not token.lemma:
            raise ValidationError(f"token {token.index} ({token.form}) has no lemma")
        fields.append(token.lemma)
    for value in fields:
        if spec.joiner in value:
            raise ValidationError(
                f"joiner {spec.joiner!r} occurs inside {value!r}; "
                "configure a different joiner"
            )
        if any(c.isspace() for c in value):
            raise ValidationError(f"whitespace inside token field {value!r}")
    if "M" in spec.tasks:
        if codebook is None:
            raise ValidationError("M task requires a codebook")
        fields.append(codebook.code_for(token.morph))
    return spec.joiner.join(fields)


def make_sample(
    unit: Unit, spec: TaskSpec, codebook: Optional[Codebook] = None
) -> TaskSample:
    """Serialize one sentence or paragraph into a task sample."""
    if spec.tasks == ("O",):
        raise ValidationError("OCR samples come from make_ocr_sample")
    raw = unit.raw_text
    if not raw:
        raise ValidationError("unit has no running text")
    tokens = _unit_tokens(unit)
    target = " ".join(_token_unit(t, spec, codebook) for t in tokens)
    flag = unit.has_reconstructed and spec.include_reconstructed
    source = ("R " if flag else "") + spec.prefix + " " + raw
    return TaskSample(
        tasks=spec.tasks, source=source, target=target, reconstructed_flag=flag
    )


def truncate_at_whitespace(text: str, limit: int) -> str:
    """Cut at the last whitespace before ``limit``; hard cut if none."""
    if len(text) <= limit:
        return text
    cut = text.rfind(" ", 0, limit + 1)
    if cut <= 0:
        return text[:limit]
    return text[:cut]


def make_ocr_sample(
    noisy: str, clean: str, max_chars: Optional[int] = None
) -> TaskSample:
    """Parallel OCR post-correction pair: source 'O '+noisy, target clean."""
    if not clean:
        raise ValidationError("OCR sample needs a non-empty clean side")
    if max_chars is not None:
        noisy = truncate_at_whitespace(noisy, max_chars)
        clean = truncate_at_whitespace(clean, max_chars)
    return TaskSample(tasks=("O",), source="O " + noisy, target=clean)


def mask_mantras(sentence: Sentence) -> Sentence:
    """Replace POS and morph of old Vedic citations with the MANTRA tag."""
    if not sentence.is_mantra:
        return sentence
    masked = tuple(
        replace(t, upos=MANTRA_LABEL, morph=MANTRA_TAG) for t in sentence.tokens
    )
    return replace(sentence, tokens=masked)


def _concatenate(parts: Sequence[Sentence], text_id: str) -> Sentence:
    tokens: list[Token] = []
    offset = 0
    for part in parts:
        for t in part.tokens:
            head = t.head
            if head is not None and head != 0:
                head += offset
            tokens.append(replace(t, index=t.index + offset, head=head))
        offset += len(part)
    return Sentence(
        tokens=tuple(tokens),
        text_id=text_id,
        category=parts[0].category,
        raw_text=" ".join(p.raw_text for p in parts),
        is_mantra=False,
    )


def augment_dep_training(
    sentences: Sequence[Sentence],
    max_concat: int = 4,
    seed: int = 0,
    n_augment: Optional[int] = None,
) -> list[Sentence]:
    """Append synthetic sentences built by concatenating training sentences.

    Each synthetic sentence concatenates k in {2..max_concat} uniformly
    drawn sentences; token indices are re-based and every sub-tree keeps
    its own root attached to 0. Deterministic under the seed.
    """
    sentences = list(sentences)
    if max_concat <= 1 or not sentences:
        return sentences
    if n_augment is None:
        n_augment = len(sentences)
    rng = random.Random(seed)
    out = list(sentences)
    for i in range(n_augment):
        k = rng.randint(2, max_concat)
        parts = [sentences[rng.randrange(len(sentences))] for _ in range(k)]
        out.append(_concatenate(parts, text_id=f"aug-{i}"))
    return out


def generate_samples(
    sentences: Iterable[Sentence],
    spec: TaskSpec,
    codebook: Optional[Codebook] = None,
    budget: int = DEFAULT_PARAGRAPH_BUDGET,
) -> Iterator[TaskSample]:
    """Samples for a whole corpus, honoring granularity and the
    reconstructed-forms ablation filter."""
    units: Iterable[Unit]
    if spec.granularity == "paragraph":
        units = build_paragraphs(list(sentences), budget=budget)
    else:
        units = sentences
    for unit in units:
        if not spec.include_reconstructed and unit.has_reconstructed:
            continue
        yield make_sample(unit, spec, codebook)


def segmentation_report(
    sentences: Iterable[Sentence], rules: Optional[RuleTable] = None
) -> tuple[int, int]:
    """(consistent, violating) counts of raw_text vs re-synthesized forms.

    Heuristically supplied corpus forms may not re-synthesize; callers log
    the counts instead of dropping anything.
    """
    ok = 0
    bad = 0
    for sentence in sentences:
        if validate_segmentation(sentence.raw_text, sentence.forms(), rules):
            ok += 1
        else:
            bad += 1
    return ok, bad


def write_pairs(
    pairs: Iterable[tuple[str, str]], target, header: Iterable[str] = ()
) -> int:
    """TSV emission: 'source<TAB>target' per line after '#' header lines."""
    from pathlib import Path

    lines = []
    for comment in header:
        if not comment.startswith("#"):
            comment = "# " + comment
        lines.append(comment)
    count = 0
    for source, tgt in pairs:
        check_no_tabs(source, "sample source")
        check_no_tabs(tgt, "sample target")
        lines.append(f"{source}\t{tgt}")
        count += 1
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)
    return count


def write_samples(
    samples: Iterable[TaskSample], target, header: Iterable[str] = ()
) -> int:
    return write_pairs(((s.source, s.target) for s in samples), target, header)


def read_sample_pairs(source) -> list[tuple[str, str]]:
    """Read (source, target) pairs from the sample TSV format."""
    from pathlib import Path

    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(
                f"sample line {lineno}: expected 2 columns, got {len(parts)}"
            )
        pairs.append((parts[0], parts[1]))
    return pairs


class SampleGenerator(BaseEstimator, TransformerMixin):
    """sklearn-style transformer: sentences -> task samples."""

    def __init__(self, tasks: str = "S", granularity: str = "sentence",
                 include_reconstructed: bool = True, joiner: str = DEFAULT_JOINER,
                 budget: int = DEFAULT_PARAGRAPH_BUDGET,
                 codebook: Optional[Codebook] = None):
        self.tasks = tasks
        self.granularity = granularity
        self.include_reconstructed = include_reconstructed
        self.joiner = joiner
        self.budget = budget
        self.codebook = codebook

    def fit(self, X=None, y=None):
        self.spec_ = TaskSpec(
            tasks=tuple(self.tasks),
            granularity=self.granularity,
            include_reconstructed=self.include_reconstructed,
            joiner=self.joiner,
        )
        return self

    def transform(self, X: Iterable[Sentence]) -> list[TaskSample]:
        if not hasattr(self, "spec_"):
            self.fit()
        return list(
            generate_samples(X, self.spec_, codebook=self.codebook, budget=self.budget)
        )
