"""Chat sessions: the ordered message log and pending conversation state."""

import threading
from dataclasses import dataclass, field

from iotchat.nlu.context import ContextStack

AUTHOR_USER = "user"
AUTHOR_BOT = "bot"
AUTHOR_OPERATOR = "operator"

MASK = "*****"

MODE_BOT = "bot"
MODE_OPERATOR = "human_operator"


@dataclass
class ChatMessage:
    author: str
    text: str
    cursor: int
    options: list[str] | None = None
    masked: bool = False

    def to_dict(self) -> dict:
        return {
            "author": self.author,
            "text": self.text,
            "cursor": self.cursor,
            "options": self.options,
            "masked": self.masked,
        }


@dataclass
class PendingClarification:
    question: str
    labels: list[str]
    values: list
    slot: str
    intent_name: str
    action_name: str
    parameters: dict
    failures: int = 0


@dataclass
class PendingWizard:
    stage: str  # select | field
    options: list[tuple[str, str]] = field(default_factory=list)  # (serial, label)
    serial: str | None = None
    label: str | None = None
    field_index: int = 0
    failures: int = 0


@dataclass
class PendingEscalation:
    serial: str
    vendor: str
    name: str
    attempts: int = 0


Pending = PendingClarification | PendingWizard | PendingEscalation


@dataclass
class Session:
    session_id: str
    principal: str
    contexts: ContextStack
    created_at: float = 0.0
    mode: str = MODE_BOT
    operator: str | None = None
    pending: Pending | None = None
    messages: list[ChatMessage] = field(default_factory=list)
    turn_counter: int = 0
    alert_backlog: list = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def append(
        self,
        author: str,
        text: str,
        options: list[str] | None = None,
        masked: bool = False,
    ) -> ChatMessage:
        # Masked text is stored already redacted; the secret never enters the log.
        message = ChatMessage(
            author=author,
            text=MASK if masked else text,
            cursor=len(self.messages),
            options=list(options) if options else None,
            masked=masked,
        )
        self.messages.append(message)
        return message

    def messages_since(self, cursor: int) -> list[ChatMessage]:
        if cursor < 0:
            return list(self.messages)
        return [m for m in self.messages if m.cursor > cursor]

    def last_user_text(self) -> str:
        for message in reversed(self.messages):
            if message.author == AUTHOR_USER:
                return message.text
        return ""
