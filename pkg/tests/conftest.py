import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from iotchat.config import parse_config
from iotchat.system import build_system, default_config_path


@pytest.fixture(scope="session")
def config_doc():
    return json.loads(default_config_path().read_text(encoding="utf-8"))


@pytest.fixture()
def system(config_doc):
    """A freshly seeded system per test."""
    return build_system(parse_config(json.loads(json.dumps(config_doc))))


@pytest.fixture()
def fresh_system(config_doc):
    """Factory for building as many independent systems as a test needs."""

    def make(mutate=None):
        doc = json.loads(json.dumps(config_doc))
        if mutate is not None:
            mutate(doc)
        return build_system(parse_config(doc))

    return make
