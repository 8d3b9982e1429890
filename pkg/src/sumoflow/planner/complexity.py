"""Task complexity assessment with a deterministic rule fallback.

The language model gets first say; the host validates its output against
the three-level enum and falls back to keyword rules when the model is
unavailable or answers outside the enum.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import EmptyQueryError

LEVELS = ("simple", "complex", "agentic")


@dataclass(frozen=True)
class TaskComplexity:
    level: str
    rationale: str

    def __post_init__(self) -> None:
        if self.level not in LEVELS:
            raise ValueError(f"complexity level must be one of {LEVELS}")


# open-ended optimization under constraints
_AGENTIC_PATTERNS = [
    r"\bfind (?:an? )?(?:optimal|best|where)\b",
    r"\bhow to (?:clear|mitigate|reduce|improve)\b",
    r"\boptimal .*(?:policy|strategy|plan)\b",
    r"\bstrategy\b.*\bunder\b",
    r"\bclear it faster\b",
    r"\bwhat .* should (?:we|i) (?:do|apply)\b",
]
# comparison / effect analysis phrasing
_COMPLEX_PATTERNS = [
    r"\bcompare\b",
    r"\bhow (?:will|would|does) .* affect\b",
    r"\banaly[sz]e\b",
    r"\bimpact of\b",
    r"\bbefore and after\b",
    r"\bwhat if\b",
    r"\beffect of\b",
]


def rule_classify(query: str) -> TaskComplexity:
    """Keyword fallback: agentic checked first, then complex, else simple."""
    text = " ".join(query.lower().split())
    for pattern in _AGENTIC_PATTERNS:
        if re.search(pattern, text):
            return TaskComplexity("agentic", f"matched open-ended goal phrasing ({pattern})")
    for pattern in _COMPLEX_PATTERNS:
        if re.search(pattern, text):
            return TaskComplexity("complex", f"matched comparison/analysis phrasing ({pattern})")
    return TaskComplexity("simple", "single-step request with a clear objective")


def classify_complexity(query: str, llm_suggestion: dict | None = None) -> TaskComplexity:
    """Validate the model's classification, falling back to rules.

    llm_suggestion is the structured decision returned by the model,
    expected shape {"level": ..., "rationale": ...}; anything outside the
    enum is discarded.
    """
    if not query or not query.strip():
        raise EmptyQueryError("cannot classify an empty query")
    if isinstance(llm_suggestion, dict):
        level = llm_suggestion.get("level")
        if isinstance(level, str) and level.strip().lower() in LEVELS:
            rationale = str(llm_suggestion.get("rationale", "model classification"))
            return TaskComplexity(level.strip().lower(), rationale)
    return rule_classify(query)
