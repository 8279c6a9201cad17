"""Phrase lexicon and entity extraction.

Entries map surface token sequences to canonical attribute dicts. A phrase
token is either a literal lowercase word or a capture placeholder written
``{name:kind}``; captures are substituted into attribute templates whose
value is exactly ``{name}``, preserving the captured scalar's type.
"""

import re
from dataclasses import dataclass

from iotchat.nlu.types import ENTITY_TYPES, EntityMatch

_PLACEHOLDER = re.compile(r"^\{([a-z_]+):(int|number|dollars)\}$")
_LITERAL = re.compile(r"^[a-z0-9]+$")
_INT = re.compile(r"^\d+$")
_NUMBER = re.compile(r"^\d+(?:\.\d+)?$")
_DOLLARS = re.compile(r"^\$\d+$")


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Placeholder:
    capture: str
    kind: str  # int | number | dollars

    def match(self, token: str):
        """Return the captured scalar for ``token`` or None."""
        if self.kind == "int":
            return int(token) if _INT.match(token) else None
        if self.kind == "number":
            if not _NUMBER.match(token):
                return None
            return float(token) if "." in token else int(token)
        if self.kind == "dollars":
            return int(token[1:]) if _DOLLARS.match(token) else None
        return None


PhraseToken = str | Placeholder


def parse_phrase_token(raw: str) -> PhraseToken:
    m = _PLACEHOLDER.match(raw)
    if m:
        return Placeholder(m.group(1), m.group(2))
    if not _LITERAL.match(raw):
        raise LexiconError(
            f"phrase token {raw!r} must be a lowercase punctuation-free word "
            "or a {name:kind} placeholder"
        )
    return raw


@dataclass
class LexiconEntry:
    entity_type: str
    phrases: list[list[PhraseToken]]
    attributes: dict

    def __post_init__(self):
        if self.entity_type not in ENTITY_TYPES:
            raise LexiconError(f"unknown entity type {self.entity_type!r}")
        if not self.phrases or any(not p for p in self.phrases):
            raise LexiconError("every lexicon entry needs at least one non-empty phrase")
        if not self.attributes:
            raise LexiconError("lexicon attributes must be non-empty")
        if self.entity_type == "money":
            missing = {"amount", "currency"} - set(self.attributes)
            if missing:
                raise LexiconError(f"money entries must carry {sorted(missing)}")


def _match_phrase(phrase: list[PhraseToken], tokens: list[str], start: int):
    """Match ``phrase`` at ``start``; return the capture map or None."""
    if start + len(phrase) > len(tokens):
        return None
    captures: dict = {}
    for offset, item in enumerate(phrase):
        token = tokens[start + offset]
        if isinstance(item, Placeholder):
            value = item.match(token)
            if value is None:
                return None
            captures[item.capture] = value
        elif item != token:
            return None
    return captures


def _fill_attributes(template: dict, captures: dict) -> dict:
    attrs = {}
    for key, value in template.items():
        if isinstance(value, str) and value.startswith("{") and value.endswith("}"):
            name = value[1:-1]
            if name not in captures:
                raise LexiconError(f"attribute {key!r} references unknown capture {name!r}")
            attrs[key] = captures[name]
        else:
            attrs[key] = value
    return attrs


class LexiconMatcher:
    """Greedy longest-match entity extractor over a fixed lexicon.

    Index phrases by their first literal token so a scan position only
    examines plausible candidates; placeholder-led phrases are checked at
    every position. Ties on match length go to the earliest lexicon entry,
    then the earliest phrase within it.
    """

    def __init__(self, entries: list[LexiconEntry]):
        self.entries = entries
        self._by_first_token: dict[str, list[tuple[int, int]]] = {}
        self._wildcard_first: list[tuple[int, int]] = []
        for ei, entry in enumerate(entries):
            for pi, phrase in enumerate(entry.phrases):
                head = phrase[0]
                if isinstance(head, Placeholder):
                    self._wildcard_first.append((ei, pi))
                else:
                    self._by_first_token.setdefault(head, []).append((ei, pi))

    def extract(self, tokens: list[str]) -> list[EntityMatch]:
        matches: list[EntityMatch] = []
        i = 0
        n = len(tokens)
        while i < n:
            best = None  # (-length, entry_idx, phrase_idx, captures)
            candidates = self._by_first_token.get(tokens[i], []) + self._wildcard_first
            for ei, pi in candidates:
                phrase = self.entries[ei].phrases[pi]
                captures = _match_phrase(phrase, tokens, i)
                if captures is None:
                    continue
                key = (-len(phrase), ei, pi)
                if best is None or key < best[0]:
                    best = (key, captures)
            if best is None:
                i += 1
                continue
            (neg_len, ei, _pi), captures = best
            entry = self.entries[ei]
            length = -neg_len
            matches.append(
                EntityMatch(
                    entity_type=entry.entity_type,
                    attributes=_fill_attributes(entry.attributes, captures),
                    span=(i, i + length),
                )
            )
            i += length
        return matches


def extract_entities(tokens: list[str], entries: list[LexiconEntry]) -> list[EntityMatch]:
    """One-shot extraction; prefer a shared LexiconMatcher for repeated calls."""
    return LexiconMatcher(entries).extract(tokens)
