"""Sanskrit corpus processing toolkit.

Sandhi synthesis/analysis, transliteration, CoNLL-U handling with corpus
splits, morph-tag compression, multitask sample serialization, dependency
linearization, evaluation metrics, and pluggable prediction backends.
"""

from .types import (
    MANTRA_LABEL,
    MANTRA_TAG,
    MorphTag,
    Paragraph,
    Sentence,
    TaskSample,
    Token,
    ValidationError,
    canonical_tag_string,
    validate_tree,
)

__version__ = "0.1.0"

__all__ = [
    "MANTRA_LABEL",
    "MANTRA_TAG",
    "MorphTag",
    "Paragraph",
    "Sentence",
    "TaskSample",
    "Token",
    "ValidationError",
    "canonical_tag_string",
    "validate_tree",
    "__version__",
]
