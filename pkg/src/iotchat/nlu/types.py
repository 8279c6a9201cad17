"""Core value types shared across the understanding pipeline."""

from dataclasses import dataclass, field

ENTITY_TYPES = ("iot", "location", "money", "color", "datetime", "number", "option_ref")

# Canonical device categories carried by "iot" entities, keyed to fleet kinds.
CATEGORY_KINDS = {
    "Thermostat": "thermostat",
    "Light": "light",
    "Lock": "lock",
    "Car": "car",
    "Kettle": "kettle",
}

# Which attribute of each entity type fills a slot.
PRIMARY_ATTRIBUTE = {
    "iot": "device",
    "location": "value",
    "money": "amount",
    "color": "value",
    "datetime": "value",
    "number": "value",
    "option_ref": "selector",
}


@dataclass(frozen=True)
class Utterance:
    session_id: str
    text: str
    turn_index: int


@dataclass(frozen=True)
class EntityMatch:
    """One decoded surface phrase: canonical attributes plus its token span."""

    entity_type: str
    attributes: dict
    span: tuple[int, int]

    def primary_value(self):
        return self.attributes.get(PRIMARY_ATTRIBUTE[self.entity_type])


@dataclass(frozen=True)
class DeviceRef:
    """The engine's minimal view of a controllable device."""

    serial: str
    name: str
    kind: str
    location: str


@dataclass
class ResolvedAction:
    action_name: str
    parameters: dict
    matched_intent: str
    consumed_entities: list[EntityMatch] = field(default_factory=list)


@dataclass
class Clarification:
    question: str
    options: list[str]
    pending_slot: str
    # Continuation payload so a later reply can complete the action.
    intent_name: str = ""
    action_name: str = ""
    parameters: dict = field(default_factory=dict)
    option_values: list = field(default_factory=list)


@dataclass
class Fallback:
    reason: str


ParseResult = ResolvedAction | Clarification | Fallback


def join_options(labels: list[str]) -> str:
    """Render an option list the way a person would say it: "A, B or C"."""
    if not labels:
        return ""
    if len(labels) == 1:
        return labels[0]
    return ", ".join(labels[:-1]) + " or " + labels[-1]
