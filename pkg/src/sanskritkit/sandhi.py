"""Sandhi synthesis and analysis over a declarative rewrite-rule table.

Synthesis is deterministic: at a word junction the single highest-priority
matching rule rewrites the contact phonemes, and when no rule matches the
words stay space-separated. Analysis runs the table backwards and is
deliberately non-deterministic: it enumerates every split the table can
license at a position.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from sklearn.base import BaseEstimator, TransformerMixin

from .types import ValidationError
from .validation import collapse_spaces, nfc


@dataclass(frozen=True)
class SandhiRule:
    """Rewrite (end of left word, start of right word) -> junction output."""

    left_pattern: str
    right_pattern: str
    output: str
    priority: int

    def __post_init__(self) -> None:
        if not self.left_pattern or not self.right_pattern:
            raise ValidationError("sandhi rule patterns must be non-empty")
        for pattern in (self.left_pattern, self.right_pattern):
            if any(c.isspace() for c in pattern):
                raise ValidationError(f"whitespace in sandhi pattern {pattern!r}")


@dataclass(frozen=True)
class SplitCandidate:
    """One way to undo a junction; ``rule`` is None for plain concatenation."""

    left: str
    right: str
    rule: Optional[SandhiRule]

    @property
    def pair(self) -> tuple[str, str]:
        return (self.left, self.right)


class RuleTable:
    """Immutable rule collection with junction lookup indexes.

    Load-time validation rejects tables where two same-priority rules could
    fire at one junction, which is what keeps synthesis deterministic.
    """

    def __init__(self, rules: Iterable[SandhiRule]):
        self.rules = tuple(rules)
        self._check_unambiguous()
        self._by_left: dict[str, list[tuple[int, SandhiRule]]] = {}
        self._by_output: dict[str, list[SandhiRule]] = {}
        for idx, rule in enumerate(self.rules):
            self._by_left.setdefault(rule.left_pattern, []).append((idx, rule))
            self._by_output.setdefault(rule.output, []).append(rule)
        self.max_left_len = max((len(r.left_pattern) for r in self.rules), default=0)
        self.max_output_len = max((len(r.output) for r in self.rules), default=0)

    def __len__(self) -> int:
        return len(self.rules)

    def _check_unambiguous(self) -> None:
        def ends_overlap(a: str, b: str) -> bool:
            return a.endswith(b) or b.endswith(a)

        def starts_overlap(a: str, b: str) -> bool:
            return a.startswith(b) or b.startswith(a)

        for i, first in enumerate(self.rules):
            for second in self.rules[i + 1 :]:
                if (
                    first.priority == second.priority
                    and ends_overlap(first.left_pattern, second.left_pattern)
                    and starts_overlap(first.right_pattern, second.right_pattern)
                ):
                    raise ValidationError(
                        "ambiguous rule table: "
                        f"({first.left_pattern}+{first.right_pattern}) and "
                        f"({second.left_pattern}+{second.right_pattern}) share "
                        f"priority {first.priority} and can match one junction"
                    )

    def best_rule(self, left: str, right: str) -> Optional[SandhiRule]:
        """Highest-priority rule matching the junction, or None."""
        best: Optional[SandhiRule] = None
        best_key: Optional[tuple[int, int]] = None
        for k in range(1, min(self.max_left_len, len(left)) + 1):
            suffix = left[-k:]
            for idx, rule in self._by_left.get(suffix, ()):
                if right.startswith(rule.right_pattern):
                    key = (rule.priority, -idx)
                    if best_key is None or key > best_key:
                        best, best_key = rule, key
        return best

    def rules_for_output(self, output: str) -> Sequence[SandhiRule]:
        return self._by_output.get(output, ())


def load_rule_table(
    path: Optional[Union[str, Path]] = None, include_optional: bool = False
) -> RuleTable:
    """Read a rule TSV: left<TAB>right<TAB>output<TAB>priority.

    Lines starting with ``#`` are comments, except that ``#off<TAB>`` marks
    a shipped-but-disabled rule which ``include_optional`` activates.
    """
    if path is None:
        source = resources.files("sanskritkit.data").joinpath("sandhi_rules.tsv")
        text = source.read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.startswith("#off\t"):
            if not include_optional:
                continue
            line = line[len("#off\t") :]
        elif not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValidationError(
                f"sandhi rule line {lineno}: expected 4 columns, got {len(parts)}"
            )
        left, right, output, priority = parts
        try:
            rules.append(
                SandhiRule(nfc(left), nfc(right), nfc(output), int(priority))
            )
        except ValueError as err:
            raise ValidationError(f"sandhi rule line {lineno}: {err}") from err
    seen = {}
    for rule in rules:
        key = (rule.left_pattern, rule.right_pattern)
        if key in seen:
            raise ValidationError(
                f"duplicate sandhi rule for junction {key[0]}+{key[1]}"
            )
        seen[key] = rule
    return RuleTable(rules)


_DEFAULT_RULES: Optional[RuleTable] = None


def default_rules() -> RuleTable:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = load_rule_table()
    return _DEFAULT_RULES


def synth(left: str, right: str, rules: Optional[RuleTable] = None) -> str:
    """Merge two words, applying the best junction rule or a space join."""
    rules = rules or default_rules()
    left, right = nfc(left), nfc(right)
    if not left:
        return right
    if not right:
        return left
    rule = rules.best_rule(left, right)
    if rule is None:
        return left + " " + right
    return (
        left[: len(left) - len(rule.left_pattern)]
        + rule.output
        + right[len(rule.right_pattern) :]
    )


def junction_span(
    left: str, right: str, rules: Optional[RuleTable] = None
) -> tuple[int, int]:
    """Span [start, end) that the junction occupies in synth(left, right)."""
    rules = rules or default_rules()
    left, right = nfc(left), nfc(right)
    if not left or not right:
        boundary = len(left)
        return (boundary, boundary)
    rule = rules.best_rule(left, right)
    if rule is None:
        return (len(left), len(left) + 1)
    start = len(left) - len(rule.left_pattern)
    return (start, start + len(rule.output))


def synth_sequence(words: Sequence[str], rules: Optional[RuleTable] = None) -> str:
    """Left-to-right fold of synth over a word sequence."""
    rules = rules or default_rules()
    merged = ""
    for word in words:
        merged = synth(merged, word, rules)
    return merged


def analyze_junction(
    merged: str, position: int, rules: Optional[RuleTable] = None
) -> list[SplitCandidate]:
    """All splits (left, right) whose synthesis reproduces ``merged``.

    The probe position must lie inside (or at the edge of) the junction's
    output span. Candidates are complete relative to the rule table and
    each one is verified by re-synthesis before being returned.
    """
    rules = rules or default_rules()
    merged = nfc(merged)
    if not 0 <= position <= len(merged):
        raise ValidationError(
            f"position {position} outside string of length {len(merged)}"
        )
    seen: dict[tuple[str, str], SplitCandidate] = {}

    def consider(left: str, right: str) -> None:
        if not left or not right or (left, right) in seen:
            return
        if synth(left, right, rules) != merged:
            return
        seen[(left, right)] = SplitCandidate(
            left=left, right=right, rule=rules.best_rule(left, right)
        )

    # plain concatenation: the junction output is the single space
    for start in (position - 1, position):
        if 0 <= start < len(merged) and merged[start] == " ":
            consider(merged[:start], merged[start + 1 :])

    max_len = rules.max_output_len
    for length in range(1, max_len + 1):
        for start in range(position - length, position + 1):
            if start < 0 or start + length > len(merged):
                continue
            chunk = merged[start : start + length]
            for rule in rules.rules_for_output(chunk):
                consider(
                    merged[:start] + rule.left_pattern,
                    rule.right_pattern + merged[start + length :],
                )
    return list(seen.values())


def validate_segmentation(
    merged: str, words: Sequence[str], rules: Optional[RuleTable] = None
) -> bool:
    """True iff re-synthesizing ``words`` reproduces ``merged``."""
    rules = rules or default_rules()
    resynth = collapse_spaces(synth_sequence(words, rules))
    return resynth == collapse_spaces(nfc(merged))


class SandhiMerger(BaseEstimator, TransformerMixin):
    """sklearn-style transformer: sequences of words -> merged strings."""

    def __init__(self, rules_path: Optional[str] = None,
                 include_optional: bool = False):
        self.rules_path = rules_path
        self.include_optional = include_optional

    def fit(self, X=None, y=None):
        if self.rules_path is None and not self.include_optional:
            self.rules_ = default_rules()
        else:
            self.rules_ = load_rule_table(
                self.rules_path, include_optional=self.include_optional
            )
        return self

    def transform(self, X: Iterable[Sequence[str]]) -> list[str]:
        if not hasattr(self, "rules_"):
            self.fit()
        return [synth_sequence(words, self.rules_) for words in X]
