"""Per-session conversational context with turn-based lifespans."""

from dataclasses import dataclass, field


@dataclass
class ContextFrame:
    name: str
    bindings: dict
    lifespan_remaining: int


@dataclass
class ContextStack:
    """Named frames that fill missing slots until their lifespan runs out.

    Lifespans count user turns. ``end_turn`` must be called exactly once per
    user turn, after parsing; frames touched that turn (consumed by slot
    filling, or freshly pushed) restart at the default lifespan instead of
    decrementing.
    """

    default_lifespan: int = 5
    frames: list[ContextFrame] = field(default_factory=list)

    def push(self, name: str, bindings: dict, lifespan: int | None = None) -> None:
        if lifespan is None:
            lifespan = self.default_lifespan
        if lifespan < 1:
            raise ValueError("context lifespan must be >= 1")
        self.frames = [f for f in self.frames if f.name != name]
        self.frames.append(ContextFrame(name, dict(bindings), lifespan))

    def lookup(self, slot: str):
        """Most recently pushed binding for ``slot``; (value, frame name) or None."""
        for frame in reversed(self.frames):
            if slot in frame.bindings:
                return frame.bindings[slot], frame.name
        return None

    def get(self, name: str) -> ContextFrame | None:
        for frame in self.frames:
            if frame.name == name:
                return frame
        return None

    def live_names(self) -> set[str]:
        return {f.name for f in self.frames}

    def end_turn(self, touched: set[str] = frozenset()) -> None:
        survivors = []
        for frame in self.frames:
            if frame.name in touched:
                frame.lifespan_remaining = self.default_lifespan
            else:
                frame.lifespan_remaining -= 1
            if frame.lifespan_remaining > 0:
                survivors.append(frame)
        self.frames = survivors
