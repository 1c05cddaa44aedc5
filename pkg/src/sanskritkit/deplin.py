"""Dependency-tree linearization for sequence-generation parsing.

Targets use absolute decimal head indices ("head:deprel" per token, 0 for
root), which keeps delinearization trivial and repairs local. The inverse
direction never fails: malformed model output is repaired toward root
attachment so attachment scoring sees plain errors instead of crashes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from sklearn.base import BaseEstimator, TransformerMixin

from .tagcodec import Codebook
from .types import Sentence, Token, ValidationError, validate_tree
from .validation import nfc

FORMAT_TAG = "dep-v1"

FEATURES_NONE = "none"
FEATURES_ALL = "all"


@dataclass(frozen=True)
class DepSampleConfig:
    features: str = FEATURES_NONE
    prefix: str = "D"
    joiner: str = "_"
    tag_codebook: Optional[Codebook] = None
    label_codebook: Optional[Codebook] = None

    def __post_init__(self) -> None:
        if self.features not in (FEATURES_NONE, FEATURES_ALL):
            raise ValidationError(f"unknown features setting {self.features!r}")


@dataclass
class RepairReport:
    """What delinearize had to fix to produce a valid tree."""

    padded: int = 0
    truncated: int = 0
    malformed_units: int = 0
    out_of_range: int = 0
    detached: int = 0  # cycle/unreachable nodes reattached to root
    details: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return (
            self.padded
            + self.truncated
            + self.malformed_units
            + self.out_of_range
            + self.detached
        )

    def note(self, kind: str, message: str) -> None:
        setattr(self, kind, getattr(self, kind) + 1)
        if len(self.details) < 50:
            self.details.append(message)


def _source_unit(token: Token, config: DepSampleConfig) -> str:
    if config.features == FEATURES_NONE:
        return token.form
    if not token.upos:
        raise ValidationError(f"token {token.index} has no POS for features=all")
    if not token.morph:
        raise ValidationError(f"token {token.index} has no morph for features=all")
    if config.tag_codebook is not None:
        code = config.tag_codebook.code_for(token.morph)
    else:
        code = token.morph.render()
    return config.joiner.join((token.form, token.upos, code))


def linearize(sentence: Sentence, config: Optional[DepSampleConfig] = None) -> tuple[str, str]:
    """(source, target) for one sentence; the tree must validate."""
    config = config or DepSampleConfig()
    report = validate_tree(sentence)
    if not report.passes:
        raise ValidationError(f"invalid dependency tree: {'; '.join(report.notes)}")
    units = []
    labels = []
    for token in sentence.tokens:
        units.append(_source_unit(token, config))
        if not token.deprel:
            raise ValidationError(f"token {token.index} has no dependency relation")
        label = token.deprel
        if config.label_codebook is not None:
            label = config.label_codebook.code_for(label)
        labels.append(f"{token.head}:{label}")
    source = config.prefix + " " + " ".join(units)
    return source, " ".join(labels)


def _parse_target_unit(
    unit: str, index: int, report: RepairReport
) -> tuple[Optional[int], str]:
    head_text, sep, label = unit.partition(":")
    if not sep:
        report.note("malformed_units", f"unit {index}: no separator in {unit!r}")
        return None, "root"
    try:
        head = int(head_text)
    except ValueError:
        report.note("malformed_units", f"unit {index}: head {head_text!r} not integer")
        return None, label or "root"
    return head, label or "root"


def delinearize(
    source: str,
    target: str,
    config: Optional[DepSampleConfig] = None,
) -> tuple[Sentence, RepairReport]:
    """Rebuild a sentence (heads and relations only) from model output.

    Never raises on malformed output: unit-count mismatches are truncated
    or padded with root attachments, out-of-range heads and cycles are
    reattached to root, and every repair is counted in the report.
    """
    config = config or DepSampleConfig()
    report = RepairReport()
    text = nfc(source)
    if text.startswith(config.prefix + " "):
        text = text[len(config.prefix) + 1 :]
    forms = []
    for unit in text.split():
        form = unit.split(config.joiner)[0] if config.features == FEATURES_ALL else unit
        forms.append(form or unit)
    n = len(forms)

    units = nfc(target).split()
    if len(units) > n:
        for extra in units[n:]:
            report.note("truncated", f"dropped surplus unit {extra!r}")
        units = units[:n]
    while len(units) < n:
        report.note("padded", f"padded token {len(units) + 1} with root attachment")
        units.append("0:root")

    heads: list[int] = []
    labels: list[str] = []
    for i, unit in enumerate(units, start=1):
        head, label = _parse_target_unit(unit, i, report)
        if head is None:
            head = 0
        elif not 0 <= head <= n or head == i:
            report.note("out_of_range", f"token {i}: head {head} out of range")
            head = 0
        if config.label_codebook is not None:
            try:
                label = config.label_codebook.tag_for(label)
            except KeyError:
                pass  # unknown code: keep raw, scoring treats it as wrong
        heads.append(head)
        labels.append(label)

    # break cycles: reattach the smallest-index node of each cycle to root
    reaches_root: dict[int, bool] = {}
    for start in range(1, n + 1):
        path = []
        node = start
        while node != 0 and node not in reaches_root and node not in path:
            path.append(node)
            node = heads[node - 1]
        ok = node == 0 or reaches_root.get(node, False)
        if not ok and path:
            cycle = path[path.index(node):]
            anchor = min(cycle)
            heads[anchor - 1] = 0
            report.note("detached", f"token {anchor}: reattached to root (cycle)")
            ok = True
        for visited in path:
            reaches_root[visited] = ok

    tokens = tuple(
        Token(index=i, form=forms[i - 1] or "?", head=heads[i - 1], deprel=labels[i - 1])
        for i in range(1, n + 1)
    )
    return Sentence(tokens=tokens), report


def linearize_corpus(
    sentences: Iterable[Sentence], config: Optional[DepSampleConfig] = None
) -> list[tuple[str, str]]:
    config = config or DepSampleConfig()
    return [linearize(s, config) for s in sentences]


class DependencyLinearizer(BaseEstimator, TransformerMixin):
    """sklearn-style transformer: sentences <-> (source, target) pairs."""

    def __init__(self, features: str = FEATURES_NONE, prefix: str = "D",
                 joiner: str = "_", tag_codebook: Optional[Codebook] = None,
                 label_codebook: Optional[Codebook] = None):
        self.features = features
        self.prefix = prefix
        self.joiner = joiner
        self.tag_codebook = tag_codebook
        self.label_codebook = label_codebook

    def fit(self, X=None, y=None):
        self.config_ = DepSampleConfig(
            features=self.features,
            prefix=self.prefix,
            joiner=self.joiner,
            tag_codebook=self.tag_codebook,
            label_codebook=self.label_codebook,
        )
        return self

    def transform(self, X: Iterable[Sentence]) -> list[tuple[str, str]]:
        if not hasattr(self, "config_"):
            self.fit()
        return [linearize(s, self.config_) for s in X]

    def inverse_transform(
        self, X: Iterable[tuple[str, str]]
    ) -> list[tuple[Sentence, RepairReport]]:
        if not hasattr(self, "config_"):
            self.fit()
        return [delinearize(src, tgt, self.config_) for src, tgt in X]
