"""Loading and validation of the structured configuration document.

One JSON file describes the whole deployment: the understanding rules
("entities", "intents", "default_lifespan"), the reply templates, and the
simulated fleet ("classes", "devices", "environment", "availability_script",
"permissions"). The same document drives the CLI, the HTTP service, and the
transcript replayer; ``seed`` validates it without starting anything.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from iotchat.fabric.devices import ConfigField, DeviceClass, state_for_kind
from iotchat.nlu.intents import IntentDef, IntentError, SlotDef
from iotchat.nlu.lexicon import LexiconEntry, LexiconError, parse_phrase_token
from iotchat.nlu.types import CATEGORY_KINDS

# Template ids the gateway renders unconditionally; a config must ship them.
REQUIRED_TEMPLATES = (
    "fallback",
    "wizard_intro",
    "wizard_select",
    "wizard_none",
    "wizard_done",
    "alert_offline",
    "report_prompt",
    "report_sent",
    "report_unknown_vendor",
    "prompt_declined",
    "prompt_closed",
    "escalation_ack",
    "help_header",
    "recommend_header",
    "no_device",
    "missing_slot",
    "clarification_abandoned",
    "status_light",
    "status_thermostat",
    "status_lock",
    "status_car",
    "status_kettle",
    "err_DeviceOffline",
    "err_NotConfigured",
    "err_UnsupportedAction",
    "err_Forbidden",
    "err_NotFound",
    "err_SchemaOrder",
)


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in problems))
        self.problems = problems


@dataclass
class DeviceSeed:
    serial: str
    class_id: str
    name: str
    location: str
    state: dict = field(default_factory=dict)
    configured: bool | None = None


@dataclass
class Config:
    default_lifespan: int
    default_principal: str
    operators: list[str]
    context_push_types: list[str]
    lexicon: list[LexiconEntry]
    intents: list[IntentDef]
    actions: dict[str, list[str]]
    templates: dict[str, str]
    classes: list[DeviceClass]
    device_seeds: list[DeviceSeed]
    outside_temp: float
    availability_script: list[tuple[str, float, float]]
    permissions: dict[str, list[tuple[str, str]]]
    heartbeat_timeout: float
    offline_threshold: float

    def intent(self, name: str) -> IntentDef | None:
        for i in self.intents:
            if i.name == name:
                return i
        return None


def _parse_entities(raw, problems) -> list[LexiconEntry]:
    entries = []
    for i, item in enumerate(raw or []):
        try:
            phrases = [[parse_phrase_token(t) for t in phrase] for phrase in item["phrases"]]
            entries.append(
                LexiconEntry(
                    entity_type=item["entity_type"],
                    phrases=phrases,
                    attributes=item["attributes"],
                )
            )
        except (LexiconError, KeyError, TypeError) as exc:
            problems.append(f"entities[{i}]: {exc}")
    return entries


def _parse_intents(raw, actions, templates, problems) -> list[IntentDef]:
    intents = []
    seen = set()
    for i, item in enumerate(raw or []):
        name = item.get("name", f"<intents[{i}]>")
        if name in seen:
            problems.append(f"intent {name!r} defined twice")
        seen.add(name)
        try:
            slots = [
                SlotDef(
                    name=s["name"],
                    entity_type=s["entity_type"],
                    required=s.get("required", True),
                    category=s.get("category"),
                )
                for s in item.get("slots", [])
            ]
            intent = IntentDef(
                name=name,
                patterns=item["patterns"],
                action_name=item["action"],
                slots=slots,
                context_boosts=[tuple(b) for b in item.get("context_boosts", [])],
                reply_template=item.get("reply_template"),
                clarify_template=item.get("clarify"),
                example=item.get("example", ""),
            )
        except (IntentError, KeyError, TypeError) as exc:
            problems.append(f"intents[{i}] {name!r}: {exc}")
            continue
        if intent.action_name not in actions:
            problems.append(f"intent {name!r}: unknown action {intent.action_name!r}")
        else:
            schema = actions[intent.action_name]
            for slot in intent.slots:
                if slot.required and slot.name not in schema:
                    problems.append(
                        f"intent {name!r}: required slot {slot.name!r} missing from "
                        f"{intent.action_name!r} parameter schema"
                    )
        for slot in intent.slots:
            if slot.category is not None and slot.category not in CATEGORY_KINDS:
                problems.append(f"intent {name!r}: unknown device category {slot.category!r}")
        if intent.reply_template is not None and intent.reply_template not in templates:
            problems.append(f"intent {name!r}: unknown reply template {intent.reply_template!r}")
        intents.append(intent)
    return intents


def _parse_classes(raw, actions, problems) -> list[DeviceClass]:
    classes = []
    seen = set()
    for i, item in enumerate(raw or []):
        cid = item.get("class_id", f"<classes[{i}]>")
        if cid in seen:
            problems.append(f"class {cid!r} defined twice")
        seen.add(cid)
        try:
            schema = tuple(
                ConfigField(name=f[0], prompt=f[1], masked=bool(f[2]) if len(f) > 2 else False)
                for f in item.get("config_schema", [])
            )
            cls = DeviceClass(
                class_id=cid,
                kind=item["kind"],
                capabilities=tuple(item["capabilities"]),
                config_schema=schema,
                vendor=item.get("vendor", ""),
            )
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            problems.append(f"classes[{i}] {cid!r}: {exc}")
            continue
        for cap in cls.capabilities:
            if cap not in actions:
                problems.append(f"class {cid!r}: capability {cap!r} is not a declared action")
        classes.append(cls)
    return classes


def _parse_devices(raw, classes, problems) -> list[DeviceSeed]:
    by_id = {c.class_id: c for c in classes}
    seeds = []
    seen = set()
    for i, item in enumerate(raw or []):
        serial = item.get("serial", f"<devices[{i}]>")
        if serial in seen:
            problems.append(f"device serial {serial!r} defined twice")
        seen.add(serial)
        cls = by_id.get(item.get("class"))
        if cls is None:
            problems.append(f"device {serial!r}: unknown class {item.get('class')!r}")
            continue
        try:
            state_for_kind(cls.kind, item.get("state"))
        except (ValueError, TypeError) as exc:
            problems.append(f"device {serial!r}: bad state: {exc}")
            continue
        seeds.append(
            DeviceSeed(
                serial=serial,
                class_id=cls.class_id,
                name=item["name"],
                location=item["location"],
                state=item.get("state", {}),
                configured=item.get("configured"),
            )
        )
    return seeds


def _parse_permissions(raw, problems) -> dict:
    permissions = {}
    for principal, value in (raw or {}).items():
        if value == "*":
            permissions[principal] = [("*", "*")]
            continue
        pairs = []
        for pair in value:
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                problems.append(f"permissions[{principal!r}]: pairs must be [kind, location]")
                continue
            pairs.append((pair[0], pair[1]))
        permissions[principal] = pairs
    return permissions


def parse_config(doc: dict) -> Config:
    problems: list[str] = []

    lifespan = doc.get("default_lifespan", 5)
    if not isinstance(lifespan, int) or lifespan < 1:
        problems.append("default_lifespan must be a positive integer")
        lifespan = 5

    actions = doc.get("actions", {})
    templates = doc.get("templates", {})
    for tid in REQUIRED_TEMPLATES:
        if tid not in templates:
            problems.append(f"missing template {tid!r}")

    lexicon = _parse_entities(doc.get("entities"), problems)
    intents = _parse_intents(doc.get("intents"), actions, templates, problems)
    classes = _parse_classes(doc.get("classes"), actions, problems)
    seeds = _parse_devices(doc.get("devices"), classes, problems)
    permissions = _parse_permissions(doc.get("permissions"), problems)

    principal = doc.get("default_principal", "")
    if principal not in permissions:
        problems.append(f"default_principal {principal!r} is not in permissions")

    script = []
    serials = {s.serial for s in seeds}
    for i, row in enumerate(doc.get("availability_script", [])):
        try:
            serial, start, end = row[0], float(row[1]), float(row[2])
        except (TypeError, ValueError, IndexError):
            problems.append(f"availability_script[{i}]: expected [serial, from, to]")
            continue
        if serial not in serials:
            problems.append(f"availability_script[{i}]: unknown serial {serial!r}")
        if start >= end:
            problems.append(f"availability_script[{i}]: needs from < to")
        script.append((serial, start, end))

    env = doc.get("environment", {})
    monitor = doc.get("monitor", {})
    heartbeat = float(monitor.get("heartbeat_timeout", 120))
    threshold = float(monitor.get("offline_threshold", 86400))
    if heartbeat <= 0 or threshold <= 0:
        problems.append("monitor timeouts must be positive")

    if problems:
        raise ConfigError(problems)

    return Config(
        default_lifespan=lifespan,
        default_principal=principal,
        operators=list(doc.get("operators", [])),
        context_push_types=list(doc.get("context_push_types", ["location"])),
        lexicon=lexicon,
        intents=intents,
        actions=actions,
        templates=templates,
        classes=classes,
        device_seeds=seeds,
        outside_temp=float(env.get("outside_temp", 17.0)),
        availability_script=script,
        permissions=permissions,
        heartbeat_timeout=heartbeat,
        offline_threshold=threshold,
    )


def load_config(path: str | Path) -> Config:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(json.load(fh))
