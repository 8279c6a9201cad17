"""Interpretation of replies to clarification questions."""

from iotchat.nlu.normalize import normalize


def interpret_clarification_reply(reply_text: str, options: list[str]) -> list[int] | None:
    """Map a reply onto 0-based option indices, or None to re-prompt.

    Accepted forms, in order: a 1-based numeric index (an out-of-range number
    is a failure, not a name), a case-insensitive option name, and
    "both"/"all" selecting every option.
    """
    tokens = normalize(reply_text)
    # isdecimal, not isdigit: superscripts count as digits but int() rejects them
    if len(tokens) == 1 and tokens[0].isdecimal():
        index = int(tokens[0])
        if 1 <= index <= len(options):
            return [index - 1]
        return None
    for i, label in enumerate(options):
        if normalize(label) == tokens:
            return [i]
    if tokens in (["both"], ["all"]):
        return list(range(len(options)))
    return None
