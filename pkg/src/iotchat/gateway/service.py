"""The chatbot service: sessions, the utterance pipeline, wizards, alerts,
error reports, and the human-operator handoff."""

import logging
import threading
from dataclasses import dataclass

from iotchat.config import Config
from iotchat.fabric import Fabric, FabricError
from iotchat.fabric.errors import CONFLICT, FORBIDDEN, NOT_FOUND
from iotchat.monitor import AlertEvent, Monitor
from iotchat.nlu import (
    Clarification,
    DeviceRef,
    Engine,
    Fallback,
    IntentDef,
    ResolvedAction,
    Utterance,
    interpret_clarification_reply,
    normalize,
)
from iotchat.gateway.session import (
    AUTHOR_BOT,
    AUTHOR_OPERATOR,
    AUTHOR_USER,
    MODE_BOT,
    MODE_OPERATOR,
    ChatMessage,
    PendingClarification,
    PendingEscalation,
    PendingWizard,
    Session,
)
from iotchat.gateway.templates import Templates

logger = logging.getLogger(__name__)

AFFIRMATIVE = {"yes", "y", "ok", "sure"}
NEGATIVE = {"no", "n", "nope"}
CLARIFICATION_ATTEMPTS = 3

DEFAULT_CHUNK_SECONDS = 60.0


@dataclass
class ErrorReport:
    report_id: str
    serial_id: str
    issue: str
    stakeholder: str
    created_at: float
    status: str = "open"

    def to_dict(self) -> dict:
        return {
            "report_id": self.report_id,
            "serial_id": self.serial_id,
            "issue": self.issue,
            "stakeholder": self.stakeholder,
            "created_at": self.created_at,
            "status": self.status,
        }


class Gateway:
    def __init__(self, config: Config, fabric: Fabric, monitor: Monitor):
        self.config = config
        self.fabric = fabric
        self.monitor = monitor
        self.templates = Templates(config.templates)
        self.engine = Engine(
            lexicon=config.lexicon,
            intents=config.intents,
            default_lifespan=config.default_lifespan,
        )
        self.sessions: dict[str, Session] = {}
        self.reports: dict[str, ErrorReport] = {}
        self.escalation_queue: list[tuple[str, float]] = []  # (session_id, since)
        self.queued_alerts: dict[str, list[dict]] = {}  # principal -> alert payloads
        self.pipeline_calls = 0  # observability: NLU runs, for exclusivity checks
        self.command_log: list[tuple[str, str, str]] = []  # (principal, serial, command)
        self._lock = threading.RLock()
        self._session_seq = 0
        self._report_seq = 0

    # -- sessions ------------------------------------------------------------

    def open_session(self, principal: str) -> str:
        with self._lock:
            if not self.fabric.principal_known(principal):
                raise FabricError(FORBIDDEN, f"unknown principal {principal!r}")
            self._session_seq += 1
            session_id = f"s-{self._session_seq}"
            session = Session(
                session_id=session_id,
                principal=principal,
                contexts=self.engine.new_contexts(),
                created_at=self.fabric.now,
            )
            self.sessions[session_id] = session
            for payload in self.queued_alerts.pop(principal, []):
                self._deliver_or_backlog(session, payload)
            return session_id

    def session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise FabricError(NOT_FOUND, f"unknown session {session_id!r}")
        return session

    def messages_since(self, session_id: str, cursor: int) -> list[ChatMessage]:
        return self.session(session_id).messages_since(cursor)

    # -- the pipeline ----------------------------------------------------------

    def handle_utterance(self, session_id: str, text: str) -> list[ChatMessage]:
        """Handle one user turn; returns every message this turn appended."""
        session = self.session(session_id)
        with session.lock:
            before = len(session.messages)
            masked = self.expects_masked_reply(session)
            session.append(AUTHOR_USER, text, masked=masked)

            if session.mode == MODE_OPERATOR:
                # Relayed to the holding operator; the bot stays silent.
                return session.messages[before:]

            session.turn_counter += 1
            turn_index = session.turn_counter - 1

            if isinstance(session.pending, PendingClarification):
                touched = self._clarification_turn(session, text)
            elif isinstance(session.pending, PendingWizard):
                touched = self._wizard_turn(session, text)
            elif isinstance(session.pending, PendingEscalation):
                touched = self._escalation_turn(session, text)
            else:
                touched = self._pipeline_turn(session, text, turn_index)

            session.contexts.end_turn(touched)

            if session.pending is None and session.alert_backlog:
                self._deliver_alert(session, session.alert_backlog.pop(0))
            return session.messages[before:]

    def expects_masked_reply(self, session: Session) -> bool:
        pending = session.pending
        if not (isinstance(pending, PendingWizard) and pending.stage == "field"):
            return False
        schema = self._schema_for(pending.serial)
        return bool(schema) and pending.field_index < len(schema) and schema[pending.field_index].masked

    def _schema_for(self, serial: str):
        device = self.fabric.devices.get(serial)
        if device is None:
            return ()
        return self.fabric.cls_of(device).config_schema

    def _device_view(self, principal: str):
        def view(action: str) -> list[DeviceRef]:
            refs = []
            for device in self.fabric.devices_in_order():
                cls = self.fabric.cls_of(device)
                if action not in cls.capabilities:
                    continue
                if not self.fabric.visible(principal, cls.kind, device.location):
                    continue
                refs.append(DeviceRef(device.serial_id, device.friendly_name, cls.kind, device.location))
            return refs
        return view

    def _pipeline_turn(self, session: Session, text: str, turn_index: int) -> set[str]:
        self.pipeline_calls += 1
        utterance = Utterance(session.session_id, text, turn_index)
        analysis = self.engine.parse(
            utterance, session.contexts, self._device_view(session.principal)
        )
        result = analysis.result
        touched = set(analysis.consumed_contexts)

        if isinstance(result, ResolvedAction):
            intent = self.config.intent(result.matched_intent)
            touched |= self._execute(session, intent, result.parameters)
            # Counted after execution so a recommendation never includes itself.
            self.monitor.record_query(session.principal, result.matched_intent)
        elif isinstance(result, Clarification):
            self.monitor.record_query(session.principal, result.intent_name)
            session.pending = PendingClarification(
                question=result.question,
                labels=result.options,
                values=result.option_values,
                slot=result.pending_slot,
                intent_name=result.intent_name,
                action_name=result.action_name,
                parameters=result.parameters,
            )
            session.append(AUTHOR_BOT, result.question, options=result.options)
        else:
            self._append_fallback(session, result)
        return touched

    def _append_fallback(self, session: Session, fallback: Fallback) -> None:
        reason = fallback.reason
        if reason == "no_device":
            session.append(AUTHOR_BOT, self.templates.render("no_device"))
        elif reason.startswith("missing_slot:"):
            slot = reason.split(":", 1)[1]
            session.append(AUTHOR_BOT, self.templates.render("missing_slot", slot=slot))
        else:
            session.append(AUTHOR_BOT, self.templates.render("fallback"))

    # -- action execution ------------------------------------------------------

    def _execute(self, session: Session, intent: IntentDef, params: dict) -> set[str]:
        action = intent.action_name
        if action.startswith("bot."):
            if action == "bot.help":
                session.append(AUTHOR_BOT, self.help_text())
            elif action == "bot.recommend":
                session.append(AUTHOR_BOT, self.recommend_text(session.principal))
            elif action == "bot.setupWizard":
                self._start_wizard(session)
            else:
                session.append(AUTHOR_BOT, self.templates.render("fallback"))
        else:
            serials = params.get("device") or []
            successes = []
            for serial in serials:
                try:
                    successes.append(self.fabric.invoke(serial, action, params, session.principal))
                    self.command_log.append((session.principal, serial, action))
                except FabricError as exc:
                    self._append_device_error(session, exc, serial)
            if successes:
                self._append_action_replies(session, intent, params, successes)

        pushed: set[str] = set()
        for slot_name in self.config.context_push_types:
            value = params.get(slot_name)
            if isinstance(value, str):
                session.contexts.push(slot_name, {slot_name: value})
                pushed.add(slot_name)
        return pushed

    def _append_device_error(self, session: Session, exc: FabricError, serial: str) -> None:
        device = self.fabric.devices.get(serial)
        name = device.friendly_name if device else serial
        template_id = f"err_{exc.code}"
        if self.templates.raw(template_id) is None:
            template_id = "fallback"
        session.append(AUTHOR_BOT, self.templates.render(template_id, name=name))

    def _append_action_replies(
        self, session: Session, intent: IntentDef, params: dict, results: list[dict]
    ) -> None:
        scalars = {k: v for k, v in params.items() if k != "device"}
        template_id = intent.reply_template
        if template_id is None:
            # Status-style replies are rendered per device, by kind.
            for result in results:
                kind = result.get("kind", "")
                session.append(AUTHOR_BOT, self.templates.render(f"status_{kind}", **result))
            return
        template = self.templates.raw(template_id) or ""
        if "{names}" in template:
            names = [r["name"] for r in results]
            session.append(AUTHOR_BOT, self.templates.render(template_id, names=names, **scalars))
        else:
            for result in results:
                session.append(AUTHOR_BOT, self.templates.render(template_id, **{**scalars, **result}))

    # -- clarifications ---------------------------------------------------------

    def _clarification_turn(self, session: Session, text: str) -> set[str]:
        pending = session.pending
        selection = interpret_clarification_reply(text, pending.labels)
        if selection is None:
            pending.failures += 1
            if pending.failures >= CLARIFICATION_ATTEMPTS:
                session.pending = None
                session.append(AUTHOR_BOT, self.templates.render("clarification_abandoned"))
                return set()
            session.append(AUTHOR_BOT, pending.question, options=pending.labels)
            return set()

        session.pending = None
        params = dict(pending.parameters)
        params[pending.slot] = [pending.values[i] for i in selection]
        intent = self.config.intent(pending.intent_name)
        if len(selection) == 1 and intent is not None and intent.slot("location") is not None:
            device = self.fabric.devices.get(pending.values[selection[0]])
            if device is not None and "location" not in params:
                params["location"] = device.location
        if intent is None:
            session.append(AUTHOR_BOT, self.templates.render("fallback"))
            return set()
        return self._execute(session, intent, params)

    # -- the setup wizard ---------------------------------------------------------

    def _start_wizard(self, session: Session) -> None:
        unconfigured = []
        for device in self.fabric.devices_in_order():
            cls = self.fabric.cls_of(device)
            if device.configured:
                continue
            if not self.fabric.visible(session.principal, cls.kind, device.location):
                continue
            unconfigured.append((device.serial_id, device.friendly_name))

        session.append(AUTHOR_BOT, self.templates.render("wizard_intro"))
        if not unconfigured:
            session.append(AUTHOR_BOT, self.templates.render("wizard_none"))
            return
        if len(unconfigured) == 1:
            serial, label = unconfigured[0]
            session.pending = PendingWizard(stage="field", serial=serial, label=label)
            schema = self._schema_for(serial)
            session.append(AUTHOR_BOT, schema[0].prompt)
            return
        labels = [label for _serial, label in unconfigured]
        menu = " ".join(f"{i}) {label}" for i, label in enumerate(labels, start=1))
        session.pending = PendingWizard(stage="select", options=unconfigured)
        session.append(AUTHOR_BOT, self.templates.render("wizard_select"))
        session.append(AUTHOR_BOT, menu, options=labels)

    def _wizard_turn(self, session: Session, text: str) -> set[str]:
        pending = session.pending
        if pending.stage == "select":
            labels = [label for _serial, label in pending.options]
            selection = interpret_clarification_reply(text, labels)
            if selection is None or len(selection) != 1:
                pending.failures += 1
                if pending.failures >= CLARIFICATION_ATTEMPTS:
                    session.pending = None
                    session.append(AUTHOR_BOT, self.templates.render("clarification_abandoned"))
                    return set()
                menu = " ".join(f"{i}) {label}" for i, label in enumerate(labels, start=1))
                session.append(AUTHOR_BOT, menu, options=labels)
                return set()
            pending.serial, pending.label = pending.options[selection[0]]
            pending.stage = "field"
            pending.field_index = 0
            schema = self._schema_for(pending.serial)
            session.append(AUTHOR_BOT, schema[0].prompt)
            return set()

        schema = self._schema_for(pending.serial)
        field = schema[pending.field_index]
        try:
            remaining = self.fabric.configure(pending.serial, field.name, text)
            self.command_log.append((session.principal, pending.serial, f"configure:{field.name}"))
        except FabricError as exc:
            session.pending = None
            self._append_device_error(session, exc, pending.serial)
            return set()
        pending.field_index += 1
        if remaining:
            session.append(AUTHOR_BOT, schema[pending.field_index].prompt)
        else:
            session.pending = None
            session.append(AUTHOR_BOT, self.templates.render("wizard_done", name=pending.label))
        return set()

    # -- proactive alerts ----------------------------------------------------------

    def advance_clock(self, seconds: float, chunk: float = DEFAULT_CHUNK_SECONDS) -> None:
        """Advance simulated time, polling the monitor at least every ``chunk``
        seconds and exactly at availability-script boundaries."""
        if seconds <= 0:
            raise ValueError("advance_clock needs seconds > 0")
        fabric = self.fabric
        monitor = self.monitor
        end = fabric.now + seconds
        boundaries = fabric.script_boundaries(fabric.now, end)
        bi = 0
        while fabric.now < end:
            now = fabric.now
            target = now + chunk
            if target > end:
                target = end
            while bi < len(boundaries) and boundaries[bi] <= now:
                bi += 1
            if bi < len(boundaries) and boundaries[bi] < target:
                target = boundaries[bi]
            fabric.tick(target - now)
            alerts = monitor.poll(target)
            if alerts:
                for alert in alerts:
                    self._route_alert(alert)

    def _route_alert(self, alert: AlertEvent) -> None:
        info = self.fabric.describe(alert.serial_id)
        payload = {
            "serial": alert.serial_id,
            "name": info["name"],
            "vendor": info["vendor"] or "unknown",
            "hours": int(self.monitor.offline_threshold // 3600),
        }
        for principal in self.fabric.permissions:
            if not self.fabric.visible(principal, info["kind"], info["location"]):
                continue
            open_sessions = [s for s in self.sessions.values() if s.principal == principal]
            if not open_sessions:
                self.queued_alerts.setdefault(principal, []).append(payload)
                continue
            for session in open_sessions:
                with session.lock:
                    self._deliver_or_backlog(session, payload)

    def _deliver_or_backlog(self, session: Session, payload: dict) -> None:
        if session.pending is None and session.mode == MODE_BOT:
            self._deliver_alert(session, payload)
        else:
            session.alert_backlog.append(payload)

    def _deliver_alert(self, session: Session, payload: dict) -> None:
        session.append(
            AUTHOR_BOT,
            self.templates.render(
                "alert_offline", device=payload["name"].lower(), hours=payload["hours"]
            ),
        )
        session.append(
            AUTHOR_BOT,
            self.templates.render("report_prompt", vendor=payload["vendor"]),
            options=["Yes", "No"],
        )
        session.pending = PendingEscalation(
            serial=payload["serial"], vendor=payload["vendor"], name=payload["name"]
        )

    def _escalation_turn(self, session: Session, text: str) -> set[str]:
        pending = session.pending
        tokens = set(normalize(text))
        if tokens & {"human", "operator"}:
            session.pending = None
            self.escalate(session)
            return set()
        if tokens & AFFIRMATIVE:
            session.pending = None
            try:
                report = self.report_error(pending.serial, f"offline alert for {pending.name}")
            except FabricError as exc:
                self._append_device_error(session, exc, pending.serial)
                return set()
            if report.stakeholder == "unknown":
                session.append(
                    AUTHOR_BOT, self.templates.render("report_unknown_vendor", name=pending.name)
                )
            else:
                session.append(
                    AUTHOR_BOT, self.templates.render("report_sent", vendor=report.stakeholder)
                )
            return set()
        if tokens & NEGATIVE:
            session.pending = None
            session.append(AUTHOR_BOT, self.templates.render("prompt_declined"))
            return set()
        pending.attempts += 1
        if pending.attempts >= 2:
            session.pending = None
            session.append(AUTHOR_BOT, self.templates.render("prompt_closed"))
        else:
            session.append(
                AUTHOR_BOT,
                self.templates.render("report_prompt", vendor=pending.vendor),
                options=["Yes", "No"],
            )
        return set()

    # -- escalation and the operator console ------------------------------------------

    def escalate(self, session: Session) -> None:
        with self._lock:
            if all(sid != session.session_id for sid, _since in self.escalation_queue):
                self.escalation_queue.append((session.session_id, self.fabric.now))
        session.append(AUTHOR_BOT, self.templates.render("escalation_ack"))

    def operator_queue(self) -> list[dict]:
        with self._lock:
            entries = []
            for sid, since in self.escalation_queue:
                session = self.sessions[sid]
                entries.append(
                    {
                        "session_id": sid,
                        "principal": session.principal,
                        "waiting_since": since,
                        "preview": session.last_user_text(),
                    }
                )
            return entries

    def _check_operator(self, operator: str) -> None:
        if operator not in self.config.operators:
            raise FabricError(FORBIDDEN, f"unknown operator {operator!r}")

    def take_over(self, operator: str, session_id: str) -> None:
        self._check_operator(operator)
        with self._lock:
            if all(sid != session_id for sid, _since in self.escalation_queue):
                raise FabricError(CONFLICT, f"session {session_id!r} is not awaiting an operator")
            self.escalation_queue = [e for e in self.escalation_queue if e[0] != session_id]
        session = self.session(session_id)
        with session.lock:
            session.mode = MODE_OPERATOR
            session.operator = operator

    def operator_send(self, operator: str, session_id: str, text: str) -> ChatMessage:
        self._check_operator(operator)
        session = self.session(session_id)
        with session.lock:
            if session.operator != operator:
                raise FabricError(FORBIDDEN, f"{operator!r} does not hold session {session_id!r}")
            return session.append(AUTHOR_OPERATOR, text)

    def release(self, operator: str, session_id: str) -> None:
        self._check_operator(operator)
        session = self.session(session_id)
        with session.lock:
            if session.operator != operator:
                raise FabricError(FORBIDDEN, f"{operator!r} does not hold session {session_id!r}")
            session.mode = MODE_BOT
            session.operator = None

    def remote_repair(self, operator: str, serial: str) -> dict:
        self._check_operator(operator)
        info = self.fabric.remote_repair(serial)
        self.monitor.poll(self.fabric.now)
        return info

    # -- error reports -----------------------------------------------------------------

    def report_error(self, serial: str, issue: str) -> ErrorReport:
        info = self.fabric.describe(serial)  # raises NotFound for unknown serials
        with self._lock:
            self._report_seq += 1
            report = ErrorReport(
                report_id=f"r-{self._report_seq}",
                serial_id=serial,
                issue=issue,
                stakeholder=info["vendor"] or "unknown",
                created_at=self.fabric.now,
                status="dispatched",
            )
            self.reports[report.report_id] = report
            return report

    def get_report(self, report_id: str) -> ErrorReport:
        report = self.reports.get(report_id)
        if report is None:
            raise FabricError(NOT_FOUND, f"unknown report {report_id!r}")
        return report

    # -- help and recommendations ---------------------------------------------------------

    def help_text(self) -> str:
        lines = [self.templates.render("help_header")]
        for intent in self.config.intents:
            if intent.example:
                lines.append(f'- {intent.name}: "{intent.example}"')
        return "\n".join(lines)

    def recommend_text(self, principal: str) -> str:
        top = self.monitor.top_intents(principal, 3)
        if not top:
            return self.help_text()
        lines = [self.templates.render("recommend_header")]
        for name in top:
            intent = self.config.intent(name)
            example = f': "{intent.example}"' if intent is not None and intent.example else ""
            lines.append(f"- {name}{example}")
        return "\n".join(lines)
