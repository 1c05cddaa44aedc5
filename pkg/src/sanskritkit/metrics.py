"""Evaluation metrics: perfect match, UAS/LAS, CER/WER, lemma accuracy,
and the structural diff report used for manual error analysis.

All scores are micro-averaged and reported as percentages. The diff
report only categorizes structural differences (segmentation, missing or
added words, lemma and tag mismatches); deciding whether a difference is
a gold error, an ambiguity, or a model error stays a human step.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .types import Sentence, ValidationError
from .validation import check_aligned, check_nonempty, collapse_spaces, nfc


@dataclass(frozen=True)
class EvalReport:
    """One metric outcome with its exact counts."""

    metric: str
    numerator: float
    denominator: float
    per_category: dict[str, tuple[float, float]] = field(default_factory=dict)
    repairs: int = 0

    def __post_init__(self) -> None:
        if self.denominator <= 0:
            raise ValidationError(f"{self.metric}: denominator must be positive")

    @property
    def value(self) -> float:
        return 100.0 * self.numerator / self.denominator

    def category_value(self, category: str) -> float:
        num, den = self.per_category[category]
        return 100.0 * num / den if den else float("nan")

    def to_kv(self) -> str:
        lines = [
            f"metric={self.metric}",
            f"value={self.value:.4f}",
            f"numerator={self.numerator:g}",
            f"denominator={self.denominator:g}",
        ]
        if self.repairs:
            lines.append(f"repairs={self.repairs}")
        for category in sorted(self.per_category):
            lines.append(f"category.{category}={self.category_value(category):.4f}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        payload = {
            "metric": self.metric,
            "value": self.value,
            "numerator": self.numerator,
            "denominator": self.denominator,
        }
        if self.repairs:
            payload["repairs"] = self.repairs
        if self.per_category:
            payload["per_category"] = {
                k: self.category_value(k) for k in sorted(self.per_category)
            }
        return payload

    def __str__(self) -> str:
        return f"{self.metric}: {self.value:.2f} ({self.numerator:g}/{self.denominator:g})"


def _category_counts(
    flags: Sequence[tuple[float, float]], categories: Optional[Sequence[str]]
) -> dict[str, tuple[float, float]]:
    if categories is None:
        return {}
    out: dict[str, list[float]] = {}
    for (num, den), category in zip(flags, categories):
        acc = out.setdefault(category or "other", [0.0, 0.0])
        acc[0] += num
        acc[1] += den
    return {k: (v[0], v[1]) for k, v in out.items()}


def normalize_for_match(text: str) -> str:
    return collapse_spaces(nfc(text))


def perfect_match(
    predictions: Sequence[str],
    references: Sequence[str],
    categories: Optional[Sequence[str]] = None,
) -> EvalReport:
    """Percentage of pairs that are string-identical after normalization."""
    check_aligned(predictions, references, "perfect_match inputs")
    check_nonempty(references, "perfect_match references")
    flags = [
        (float(normalize_for_match(p) == normalize_for_match(r)), 1.0)
        for p, r in zip(predictions, references)
    ]
    return EvalReport(
        metric="PM",
        numerator=sum(n for n, _ in flags),
        denominator=len(flags),
        per_category=_category_counts(flags, categories),
    )


def uas_las(
    pred: Sequence[Sentence],
    gold: Sequence[Sentence],
    categories: Optional[Sequence[str]] = None,
    repairs: int = 0,
) -> tuple[EvalReport, EvalReport]:
    """Micro-averaged attachment scores over aligned sentences."""
    check_aligned(pred, gold, "uas_las inputs")
    check_nonempty(gold, "uas_las inputs")
    head_flags = []
    label_flags = []
    for p, g in zip(pred, gold):
        if len(p) != len(g):
            raise ValidationError(
                f"token count mismatch: {len(p)} predicted vs {len(g)} gold"
            )
        heads = sum(
            pt.head == gt.head for pt, gt in zip(p.tokens, g.tokens)
        )
        labels = sum(
            pt.head == gt.head and pt.deprel == gt.deprel
            for pt, gt in zip(p.tokens, g.tokens)
        )
        head_flags.append((float(heads), float(len(g))))
        label_flags.append((float(labels), float(len(g))))
    uas = EvalReport(
        metric="UAS",
        numerator=sum(n for n, _ in head_flags),
        denominator=sum(d for _, d in head_flags),
        per_category=_category_counts(head_flags, categories),
        repairs=repairs,
    )
    las = EvalReport(
        metric="LAS",
        numerator=sum(n for n, _ in label_flags),
        denominator=sum(d for _, d in label_flags),
        per_category=_category_counts(label_flags, categories),
        repairs=repairs,
    )
    return uas, las


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance with unit costs, row-vectorized with numpy.

    Items are compared as Python objects (an object-dtype scalar box avoids
    numpy's NUL-truncating string coercion), and the insertion dependency
    is resolved by a prefix-minimum: the final row value at j is
    min over k <= j of (row[k] + j - k).
    """
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    m = len(b)
    b_arr = np.array(list(b), dtype=object)
    steps = np.arange(m + 1)
    previous = steps.copy()
    box = np.empty((), dtype=object)
    for i, item in enumerate(a, start=1):
        box[()] = item
        mismatch = (b_arr != box).astype(np.int64)
        current = np.empty(m + 1, dtype=np.int64)
        current[0] = i
        np.minimum(previous[:-1] + mismatch, previous[1:] + 1, out=current[1:])
        np.add(np.minimum.accumulate(current - steps), steps, out=current)
        previous = current
    return int(previous[-1])


def cer_wer(
    predictions: Sequence[str],
    references: Sequence[str],
    categories: Optional[Sequence[str]] = None,
) -> tuple[EvalReport, EvalReport]:
    """Character and word error rates, micro-averaged, reported x100.

    Strings are NFC-normalized but otherwise raw: whitespace counts as
    characters for CER and delimits tokens for WER.
    """
    check_aligned(predictions, references, "cer_wer inputs")
    check_nonempty(references, "cer_wer inputs")
    char_flags = []
    word_flags = []
    for p, r in zip(predictions, references):
        p, r = nfc(p), nfc(r)
        char_flags.append((float(levenshtein(p, r)), float(len(r))))
        word_flags.append(
            (float(levenshtein(p.split(), r.split())), float(len(r.split())))
        )
    total_ref_chars = sum(d for _, d in char_flags)
    total_ref_words = sum(d for _, d in word_flags)
    if total_ref_chars == 0 or total_ref_words == 0:
        raise ValidationError("cer_wer: empty reference total")
    cer = EvalReport(
        metric="CER",
        numerator=sum(n for n, _ in char_flags),
        denominator=total_ref_chars,
        per_category=_category_counts(char_flags, categories),
    )
    wer = EvalReport(
        metric="WER",
        numerator=sum(n for n, _ in word_flags),
        denominator=total_ref_words,
        per_category=_category_counts(word_flags, categories),
    )
    return cer, wer


def lemma_accuracy(
    pred: Sequence[str],
    gold: Sequence[str],
    categories: Optional[Sequence[str]] = None,
) -> EvalReport:
    """Exact-match percentage over aligned lemma sequences."""
    check_aligned(pred, gold, "lemma_accuracy inputs")
    check_nonempty(gold, "lemma_accuracy inputs")
    flags = [(float(nfc(p) == nfc(g)), 1.0) for p, g in zip(pred, gold)]
    return EvalReport(
        metric="LemmaAcc",
        numerator=sum(n for n, _ in flags),
        denominator=len(flags),
        per_category=_category_counts(flags, categories),
    )


DIFF_KINDS = (
    "segmentation-mismatch",
    "missing-word",
    "added-word",
    "lemma-mismatch",
    "tag-mismatch",
)


@dataclass(frozen=True)
class DiffEntry:
    sample_index: int
    kind: str
    predicted: str
    gold: str


@dataclass(frozen=True)
class DiffReport:
    entries: tuple[DiffEntry, ...]
    samples: int

    @property
    def counts(self) -> Counter:
        return Counter(e.kind for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def to_text(self, limit: int = 50) -> str:
        lines = [f"samples={self.samples} differences={len(self.entries)}"]
        for kind in DIFF_KINDS:
            lines.append(f"{kind}={self.counts.get(kind, 0)}")
        for entry in self.entries[:limit]:
            lines.append(
                f"[{entry.sample_index}] {entry.kind}: "
                f"pred={entry.predicted!r} gold={entry.gold!r}"
            )
        if len(self.entries) > limit:
            lines.append(f"... {len(self.entries) - limit} more")
        return "\n".join(lines)


def _align_units(pred: list[str], gold: list[str]) -> list[tuple[Optional[int], Optional[int]]]:
    """Edit-distance alignment; returns (pred_idx, gold_idx) op list."""
    n, m = len(pred), len(gold)
    dist = np.zeros((n + 1, m + 1), dtype=np.int32)
    dist[:, 0] = np.arange(n + 1)
    dist[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if pred[i - 1] == gold[j - 1] else 1
            dist[i, j] = min(
                dist[i - 1, j] + 1, dist[i, j - 1] + 1, dist[i - 1, j - 1] + cost
            )
    ops: list[tuple[Optional[int], Optional[int]]] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i, j] == dist[i - 1, j - 1] + (
            0 if pred[i - 1] == gold[j - 1] else 1
        ):
            ops.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i, j] == dist[i - 1, j] + 1:
            ops.append((i - 1, None))
            i -= 1
        else:
            ops.append((None, j - 1))
            j -= 1
    ops.reverse()
    return ops


def _classify_substitution(
    pred_unit: str, gold_unit: str, tasks: Sequence[str], joiner: str
) -> str:
    pred_fields = pred_unit.split(joiner)
    gold_fields = gold_unit.split(joiner)
    if len(pred_fields) != len(gold_fields):
        return "segmentation-mismatch"
    position = 0
    for letter in ("S", "L", "M"):
        if letter not in tasks:
            continue
        if pred_fields[position] != gold_fields[position]:
            return {
                "S": "segmentation-mismatch",
                "L": "lemma-mismatch",
                "M": "tag-mismatch",
            }[letter]
        position += 1
    return "segmentation-mismatch"


def diff_report(
    pred_targets: Sequence[str],
    gold_targets: Sequence[str],
    tasks: Sequence[str] = ("S",),
    joiner: str = "_",
) -> DiffReport:
    """Align token units per sample and categorize every difference."""
    check_aligned(pred_targets, gold_targets, "diff_report inputs")
    entries: list[DiffEntry] = []
    for idx, (pred, gold) in enumerate(zip(pred_targets, gold_targets)):
        pred_units = normalize_for_match(pred).split()
        gold_units = normalize_for_match(gold).split()
        if pred_units == gold_units:
            continue
        for pred_i, gold_i in _align_units(pred_units, gold_units):
            if pred_i is not None and gold_i is not None:
                pred_unit, gold_unit = pred_units[pred_i], gold_units[gold_i]
                if pred_unit == gold_unit:
                    continue
                kind = _classify_substitution(pred_unit, gold_unit, tasks, joiner)
                entries.append(DiffEntry(idx, kind, pred_unit, gold_unit))
            elif gold_i is not None:
                entries.append(
                    DiffEntry(idx, "missing-word", "", gold_units[gold_i])
                )
            else:
                entries.append(
                    DiffEntry(idx, "added-word", pred_units[pred_i], "")
                )
    return DiffReport(entries=tuple(entries), samples=len(gold_targets))
