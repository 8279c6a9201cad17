"""Slot filling: complete a matched intent into an action or a question."""

from iotchat.nlu.context import ContextStack
from iotchat.nlu.intents import IntentDef
from iotchat.nlu.types import (
    CATEGORY_KINDS,
    Clarification,
    DeviceRef,
    EntityMatch,
    Fallback,
    ParseResult,
    ResolvedAction,
    join_options,
)

DEFAULT_CLARIFY = "Which one do you mean? {options}?"


def resolve_slots(
    intent: IntentDef,
    entities: list[EntityMatch],
    contexts: ContextStack,
    registry_view: list[DeviceRef],
) -> tuple[ParseResult, set[str]]:
    """Fill the intent's slots and bind its device target.

    Entities fill slots first (in span order), then live context frames, the
    most recently pushed frame winning. A device slot narrows the registry
    view by category and location; a unique candidate binds silently and
    backfills an empty location slot, two or more candidates come back as a
    Clarification in registry order, and zero candidates (or a missing
    non-enumerable required value) fall back.

    Returns the parse result plus the names of context frames whose bindings
    were consumed, so the caller can refresh their lifespans.
    """
    params: dict = {}
    consumed_entities: list[EntityMatch] = []
    consumed_contexts: set[str] = set()
    pool = list(entities)

    device_slot = next((s for s in intent.slots if s.entity_type == "iot"), None)

    for slot in intent.slots:
        value = None
        for match in pool:
            if match.entity_type == slot.entity_type:
                value = match.primary_value()
                consumed_entities.append(match)
                pool.remove(match)
                break
        if value is None:
            hit = contexts.lookup(slot.name)
            if hit is not None:
                value, frame_name = hit
                consumed_contexts.add(frame_name)
        if value is not None:
            params[slot.name] = value

    if device_slot is not None:
        category = params.get(device_slot.name) or device_slot.category
        kind = CATEGORY_KINDS.get(category) if category else None
        location = params.get("location")
        candidates = [
            d
            for d in registry_view
            if (kind is None or d.kind == kind) and (location is None or d.location == location)
        ]
        if not candidates:
            return Fallback("no_device"), consumed_contexts
        if len(candidates) == 1:
            chosen = candidates[0]
            params[device_slot.name] = [chosen.serial]
            if intent.slot("location") is not None and "location" not in params:
                params["location"] = chosen.location
        else:
            labels = [d.name for d in candidates]
            template = intent.clarify_template or DEFAULT_CLARIFY
            return (
                Clarification(
                    question=template.format(options=join_options(labels)),
                    options=labels,
                    pending_slot=device_slot.name,
                    intent_name=intent.name,
                    action_name=intent.action_name,
                    parameters=params,
                    option_values=[d.serial for d in candidates],
                ),
                consumed_contexts,
            )

    for slot in intent.slots:
        if slot.required and slot.name not in params:
            return Fallback(f"missing_slot:{slot.name}"), consumed_contexts

    return (
        ResolvedAction(intent.action_name, params, intent.name, consumed_entities),
        consumed_contexts,
    )
