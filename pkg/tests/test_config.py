import json

import pytest

from iotchat.config import ConfigError, parse_config
from iotchat.system import build_system, default_config_path


@pytest.fixture()
def doc(config_doc):
    return json.loads(json.dumps(config_doc))


def expect_problem(doc, needle):
    with pytest.raises(ConfigError) as err:
        parse_config(doc)
    assert any(needle in p for p in err.value.problems), err.value.problems


def test_shipped_config_parses(config_doc):
    config = parse_config(config_doc)
    assert config.default_lifespan == 5
    assert config.default_principal == "alice"
    assert [c.class_id for c in config.classes][0] == "nestio-t3"


def test_duplicate_intent_rejected(doc):
    doc["intents"].append(doc["intents"][0])
    expect_problem(doc, "defined twice")


def test_unknown_action_rejected(doc):
    doc["intents"][0]["action"] = "smartHome.doesNotExist"
    expect_problem(doc, "unknown action")


def test_required_slot_must_be_in_action_schema(doc):
    doc["intents"][0]["slots"].append({"name": "mystery", "entity_type": "color"})
    expect_problem(doc, "missing from")


def test_missing_template_rejected(doc):
    del doc["templates"]["fallback"]
    expect_problem(doc, "fallback")


def test_unknown_reply_template_rejected(doc):
    doc["intents"][0]["reply_template"] = "ghost_template"
    expect_problem(doc, "ghost_template")


def test_lock_class_needs_masked_passcode(doc):
    for cls in doc["classes"]:
        if cls["kind"] == "lock":
            cls["config_schema"] = [["passcode", "prompt", False]]
    expect_problem(doc, "masked")


def test_duplicate_serial_rejected(doc):
    doc["devices"].append(dict(doc["devices"][0]))
    expect_problem(doc, "defined twice")


def test_device_with_unknown_class_rejected(doc):
    doc["devices"][0]["class"] = "ghost"
    expect_problem(doc, "unknown class")


def test_battery_out_of_range_rejected(doc):
    for dev in doc["devices"]:
        if dev["serial"] == "car-1":
            dev["state"]["battery_pct"] = 140
    expect_problem(doc, "battery_pct")


def test_script_interval_must_be_ordered(doc):
    doc["availability_script"] = [["lock-1", 100, 50]]
    expect_problem(doc, "from < to")


def test_script_serial_must_exist(doc):
    doc["availability_script"] = [["ghost", 0, 10]]
    expect_problem(doc, "unknown serial")


def test_default_principal_must_have_permissions(doc):
    doc["default_principal"] = "zorro"
    expect_problem(doc, "zorro")


def test_uppercase_lexicon_phrase_rejected(doc):
    doc["entities"][0]["phrases"].append(["Thermostat"])
    expect_problem(doc, "lowercase")


def test_capability_must_be_declared_action(doc):
    doc["classes"][0]["capabilities"].append("smartHome.mystery")
    expect_problem(doc, "not a declared action")


def test_seeded_script_applies(doc):
    doc["availability_script"] = [["lock-1", 10, 500]]
    system = build_system(parse_config(doc))
    system.fabric.tick(60)
    assert not system.fabric.devices["lock-1"].online


def test_default_config_file_is_the_shipped_one():
    text = default_config_path().read_text(encoding="utf-8")
    assert '"Smart Lock Vendor"' in text
