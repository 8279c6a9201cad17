import pytest

from iotchat.nlu import interpret_clarification_reply as interpret


OPTIONS = ["Smart Lock", "Smart Kettle", "Smart light"]


def test_both_selects_every_option():
    assert interpret("Both", ["Lamp", "Table Light"]) == [0, 1]


def test_all_selects_every_option():
    assert interpret("all", OPTIONS) == [0, 1, 2]


def test_numeric_index_is_one_based():
    assert interpret("1", OPTIONS) == [0]
    assert interpret("3", OPTIONS) == [2]


def test_out_of_range_index_reprompts():
    assert interpret("7", ["Lamp", "Table Light"]) is None
    assert interpret("0", ["Lamp", "Table Light"]) is None


def test_name_match_is_case_insensitive():
    assert interpret("smart lock", OPTIONS) == [0]
    assert interpret("SMART KETTLE!", OPTIONS) == [1]


def test_garbage_reprompts():
    assert interpret("the blue one", OPTIONS) is None
    assert interpret("", OPTIONS) is None


def test_unicode_superscript_digit_does_not_crash():
    assert interpret("²", OPTIONS) is None  # ² is a digit but not a decimal


@pytest.mark.parametrize("n", range(2, 7))
def test_every_index_name_and_collective_resolves(n):
    options = [f"Device {i}" for i in range(1, n + 1)]
    for i in range(1, n + 1):
        assert interpret(str(i), options) == [i - 1]
    for i, label in enumerate(options):
        assert interpret(label, options) == [i]
    assert interpret("both", options) == list(range(n))
    assert interpret("all", options) == list(range(n))
    assert interpret("0", options) is None
    assert interpret(str(n + 1), options) is None
