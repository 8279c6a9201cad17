"""Deterministic rule-based natural-language understanding."""

from iotchat.nlu.clarify import interpret_clarification_reply
from iotchat.nlu.context import ContextFrame, ContextStack
from iotchat.nlu.engine import Engine, TurnAnalysis
from iotchat.nlu.intents import IntentDef, SlotDef, match_intent, score_intent
from iotchat.nlu.lexicon import (
    LexiconEntry,
    LexiconError,
    LexiconMatcher,
    Placeholder,
    extract_entities,
    parse_phrase_token,
)
from iotchat.nlu.normalize import normalize
from iotchat.nlu.slots import resolve_slots
from iotchat.nlu.types import (
    CATEGORY_KINDS,
    ENTITY_TYPES,
    Clarification,
    DeviceRef,
    EntityMatch,
    Fallback,
    ParseResult,
    ResolvedAction,
    Utterance,
    join_options,
)

__all__ = [
    "CATEGORY_KINDS",
    "ENTITY_TYPES",
    "Clarification",
    "ContextFrame",
    "ContextStack",
    "DeviceRef",
    "Engine",
    "EntityMatch",
    "Fallback",
    "IntentDef",
    "LexiconEntry",
    "LexiconError",
    "LexiconMatcher",
    "ParseResult",
    "Placeholder",
    "ResolvedAction",
    "SlotDef",
    "TurnAnalysis",
    "Utterance",
    "extract_entities",
    "interpret_clarification_reply",
    "join_options",
    "match_intent",
    "normalize",
    "parse_phrase_token",
    "resolve_slots",
    "score_intent",
]
