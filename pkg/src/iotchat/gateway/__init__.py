"""Chat gateway: sessions, pipeline, wizards, alerts, operator handoff."""

from iotchat.gateway.service import ErrorReport, Gateway
from iotchat.gateway.session import (
    AUTHOR_BOT,
    AUTHOR_OPERATOR,
    AUTHOR_USER,
    MASK,
    MODE_BOT,
    MODE_OPERATOR,
    ChatMessage,
    PendingClarification,
    PendingEscalation,
    PendingWizard,
    Session,
)
from iotchat.gateway.templates import Templates
from iotchat.gateway.transcript import (
    ReplayResult,
    Step,
    TranscriptError,
    parse_transcript,
    replay,
    replay_file,
)

__all__ = [
    "AUTHOR_BOT",
    "AUTHOR_OPERATOR",
    "AUTHOR_USER",
    "ChatMessage",
    "ErrorReport",
    "Gateway",
    "MASK",
    "MODE_BOT",
    "MODE_OPERATOR",
    "PendingClarification",
    "PendingEscalation",
    "PendingWizard",
    "ReplayResult",
    "Session",
    "Step",
    "Templates",
    "TranscriptError",
    "parse_transcript",
    "replay",
    "replay_file",
]
