"""Utterance tokenizer."""

import re

# Words keep unicode letters, numbers keep interior decimal points, and "$"
# only survives glued to digits so money literals stay a single token.
_TOKEN = re.compile(r"\$\d+(?:\.\d+)?|\d+(?:\.\d+)?|[^\W\d_]+")


def normalize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into tokens, dropping punctuation.

    Total over arbitrary unicode input; an empty or all-punctuation string
    yields an empty list.
    """
    return _TOKEN.findall(text.lower())
