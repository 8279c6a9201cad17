"""Intent definitions and pattern scoring."""

from collections import Counter
from dataclasses import dataclass, field

from iotchat.nlu.context import ContextStack
from iotchat.nlu.types import ENTITY_TYPES, EntityMatch

WILDCARD_PREFIX = "@"


class IntentError(ValueError):
    pass


@dataclass(frozen=True)
class SlotDef:
    name: str
    entity_type: str
    required: bool = True
    category: str | None = None  # preset device category for iot slots

    def __post_init__(self):
        if self.entity_type not in ENTITY_TYPES:
            raise IntentError(f"slot {self.name!r}: unknown entity type {self.entity_type!r}")
        if self.category is not None and self.entity_type != "iot":
            raise IntentError(f"slot {self.name!r}: only iot slots take a category")


@dataclass
class IntentDef:
    name: str
    patterns: list[list[str]]
    action_name: str
    slots: list[SlotDef] = field(default_factory=list)
    context_boosts: list[tuple[str, int]] = field(default_factory=list)
    reply_template: str | None = None
    clarify_template: str | None = None
    example: str = ""

    def __post_init__(self):
        if not self.patterns or any(not p for p in self.patterns):
            raise IntentError(f"intent {self.name!r} needs at least one non-empty pattern")
        for pattern in self.patterns:
            for item in pattern:
                if item.startswith(WILDCARD_PREFIX) and item[1:] not in ENTITY_TYPES:
                    raise IntentError(f"intent {self.name!r}: bad wildcard {item!r}")

    def slot(self, name: str) -> SlotDef | None:
        for s in self.slots:
            if s.name == name:
                return s
        return None


def score_intent(
    intent: IntentDef,
    tokens: list[str],
    entities: list[EntityMatch],
    live_context_names: set[str],
) -> int:
    """Bag-match score: best pattern's matched item count, plus context boosts.

    Literal pattern words draw from the raw token bag, wildcards from the
    extracted-entity bag, each occurrence usable once. Boosts only apply when
    at least one pattern item matched, so live contexts alone never trigger
    an intent.
    """
    token_counts = Counter(tokens)
    entity_counts = Counter(e.entity_type for e in entities)
    base = 0
    for pattern in intent.patterns:
        pattern_counts = Counter(pattern)
        matched = 0
        for item, want in pattern_counts.items():
            if item.startswith(WILDCARD_PREFIX):
                have = entity_counts.get(item[1:], 0)
            else:
                have = token_counts.get(item, 0)
            matched += min(want, have)
        base = max(base, matched)
    if base == 0:
        return 0
    boost = sum(bonus for name, bonus in intent.context_boosts if name in live_context_names)
    return base + boost


def match_intent(
    tokens: list[str],
    entities: list[EntityMatch],
    contexts: ContextStack,
    intents: list[IntentDef],
) -> tuple[IntentDef, int] | None:
    """Highest-scoring intent, ties broken by lexicographically smallest name."""
    live = contexts.live_names()
    best: tuple[int, str] | None = None
    winner: IntentDef | None = None
    for intent in intents:
        score = score_intent(intent, tokens, entities, live)
        if score <= 0:
            continue
        key = (-score, intent.name)
        if best is None or key < best:
            best = key
            winner = intent
    if winner is None:
        return None
    return winner, -best[0]
