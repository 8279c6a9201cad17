"""The rule-based understanding engine behind a pluggable boundary.

``Engine.parse`` is the whole pipeline for one utterance: tokenize, extract
entities, match an intent, fill slots. It is pure over its immutable
definitions; per-session state (the context stack) is owned by the caller,
which must call ``ContextStack.end_turn`` exactly once per user turn.
"""

from dataclasses import dataclass
from typing import Callable

from iotchat.nlu.context import ContextStack
from iotchat.nlu.intents import IntentDef, match_intent
from iotchat.nlu.lexicon import LexiconEntry, LexiconMatcher
from iotchat.nlu.normalize import normalize
from iotchat.nlu.slots import resolve_slots
from iotchat.nlu.types import DeviceRef, EntityMatch, Fallback, ParseResult, Utterance

# Given an action name, the devices able to run it (already permission-filtered).
DeviceProvider = Callable[[str], list[DeviceRef]]


def _no_devices(_action: str) -> list[DeviceRef]:
    return []


@dataclass
class TurnAnalysis:
    result: ParseResult
    tokens: list[str]
    entities: list[EntityMatch]
    intent_name: str | None
    score: int
    consumed_contexts: set[str]


class Engine:
    def __init__(
        self,
        lexicon: list[LexiconEntry],
        intents: list[IntentDef],
        default_lifespan: int = 5,
        device_provider: DeviceProvider = _no_devices,
    ):
        names = [i.name for i in intents]
        if len(names) != len(set(names)):
            raise ValueError("intent names must be unique")
        self.intents = intents
        self.matcher = LexiconMatcher(lexicon)
        self.default_lifespan = default_lifespan
        self.device_provider = device_provider

    def new_contexts(self) -> ContextStack:
        return ContextStack(default_lifespan=self.default_lifespan)

    def decode_entities(self, text: str) -> list[EntityMatch]:
        """Inspection hook: entity decodings for raw text."""
        return self.matcher.extract(normalize(text))

    def parse(
        self,
        utterance: Utterance,
        contexts: ContextStack,
        device_provider: DeviceProvider | None = None,
    ) -> TurnAnalysis:
        provider = device_provider or self.device_provider
        tokens = normalize(utterance.text)
        entities = self.matcher.extract(tokens)
        matched = match_intent(tokens, entities, contexts, self.intents)
        if matched is None:
            return TurnAnalysis(Fallback("no_intent"), tokens, entities, None, 0, set())
        intent, score = matched
        view = provider(intent.action_name)
        result, consumed = resolve_slots(intent, entities, contexts, view)
        return TurnAnalysis(result, tokens, entities, intent.name, score, consumed)
