"""Transcript files: the bit-exact dialog contract and its replay driver.

Format (UTF-8, one directive per line):
    U: <text>                  user turn
    B: <text>                  expected bot line (several may follow one U:)
    O: <text>                  operator takes over (first time) and sends text
    A: <serial> offline <hours>  schedule an outage starting now
    T: <seconds>               advance the simulated clock
    # ...                      comment
"""

from dataclasses import dataclass, field
from pathlib import Path

from iotchat.fabric import FabricError
from iotchat.gateway.session import AUTHOR_BOT, AUTHOR_OPERATOR, AUTHOR_USER


class TranscriptError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    kind: str  # user | bot | operator | offline | advance
    text: str = ""
    serial: str = ""
    seconds: float = 0.0
    line_no: int = 0


@dataclass
class ReplayResult:
    path: str
    problems: list[str] = field(default_factory=list)
    bot_lines: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def parse_transcript(text: str, path: str = "<transcript>") -> list[Step]:
    steps = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("U: "):
            steps.append(Step("user", text=line[3:], line_no=line_no))
        elif line.startswith("B: "):
            steps.append(Step("bot", text=line[3:], line_no=line_no))
        elif line.startswith("O: "):
            steps.append(Step("operator", text=line[3:], line_no=line_no))
        elif line.startswith("T: "):
            try:
                seconds = float(line[3:])
            except ValueError:
                raise TranscriptError(f"{path}:{line_no}: bad clock advance {line!r}")
            steps.append(Step("advance", seconds=seconds, line_no=line_no))
        elif line.startswith("A: "):
            parts = line[3:].split()
            if len(parts) != 3 or parts[1] != "offline":
                raise TranscriptError(f"{path}:{line_no}: expected 'A: <serial> offline <hours>'")
            steps.append(
                Step("offline", serial=parts[0], seconds=float(parts[2]) * 3600, line_no=line_no)
            )
        else:
            raise TranscriptError(f"{path}:{line_no}: unknown directive {line!r}")
    return steps


def replay(system, steps: list[Step], path: str = "<transcript>") -> ReplayResult:
    """Drive a fresh session through the steps, checking bot lines byte-for-byte."""
    gateway = system.gateway
    result = ReplayResult(path=path)
    session_id = gateway.open_session(system.config.default_principal)
    operator = system.config.operators[0] if system.config.operators else None
    took_over = False
    cursor = 0
    queue = []  # messages produced but not yet matched

    def drain():
        nonlocal cursor
        fresh = gateway.session(session_id).messages[cursor:]
        cursor += len(fresh)
        queue.extend(fresh)

    for step in steps:
        where = f"{path}:{step.line_no}"
        try:
            if step.kind == "user":
                drain()
                if queue:
                    result.problems.append(
                        f"{where}: unexpected unconsumed line before user turn: {queue[0].text!r}"
                    )
                    queue.clear()
                gateway.handle_utterance(session_id, step.text)
                drain()
                if queue and queue[0].author == AUTHOR_USER:
                    queue.pop(0)
                else:
                    result.problems.append(f"{where}: user turn did not echo into the log")
            elif step.kind == "bot":
                drain()
                if not queue:
                    result.problems.append(f"{where}: expected bot line {step.text!r}, got nothing")
                    continue
                message = queue.pop(0)
                if message.author != AUTHOR_BOT or message.text != step.text:
                    result.problems.append(
                        f"{where}: expected {step.text!r}, got {message.author}: {message.text!r}"
                    )
                result.bot_lines.append(message.text)
            elif step.kind == "operator":
                if operator is None:
                    result.problems.append(f"{where}: no operator configured")
                    continue
                if not took_over:
                    gateway.take_over(operator, session_id)
                    took_over = True
                gateway.operator_send(operator, session_id, step.text)
                drain()
                if not queue:
                    result.problems.append(f"{where}: operator line did not appear")
                    continue
                message = queue.pop(0)
                if message.author != AUTHOR_OPERATOR or message.text != step.text:
                    result.problems.append(
                        f"{where}: expected operator {step.text!r}, "
                        f"got {message.author}: {message.text!r}"
                    )
            elif step.kind == "advance":
                gateway.advance_clock(step.seconds)
            elif step.kind == "offline":
                now = system.fabric.now
                system.fabric.add_offline_window(step.serial, now, now + step.seconds)
        except FabricError as exc:
            result.problems.append(f"{where}: {exc.code}: {exc.message}")

    drain()
    leftovers = [m for m in queue if m.author != AUTHOR_USER]
    for message in leftovers:
        result.problems.append(f"{path}: unmatched trailing line {message.author}: {message.text!r}")
    return result


def replay_file(system, path: str | Path) -> ReplayResult:
    path = Path(path)
    steps = parse_transcript(path.read_text(encoding="utf-8"), str(path))
    return replay(system, steps, str(path))
