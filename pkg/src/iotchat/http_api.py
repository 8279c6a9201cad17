"""HTTP surface: chat sessions, operator console, device fleet, monitoring."""

import time

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from iotchat.fabric import FabricError
from iotchat.nlu import Utterance, normalize
from iotchat.system import System

_STATUS = {
    "NotFound": 404,
    "Forbidden": 403,
    "Conflict": 409,
    "DeviceOffline": 409,
    "NotConfigured": 409,
    "UnsupportedAction": 400,
    "SchemaOrder": 400,
}


class SessionIn(BaseModel):
    principal: str


class MessageIn(BaseModel):
    text: str


class OperatorIn(BaseModel):
    operator: str


class OperatorReplyIn(BaseModel):
    operator: str
    text: str


class RepairIn(BaseModel):
    operator: str
    serial: str


class ReportIn(BaseModel):
    serial: str
    issue: str


class ActionIn(BaseModel):
    action: str
    params: dict = {}
    principal: str


class ConfigIn(BaseModel):
    field: str
    value: str


class AdvanceIn(BaseModel):
    seconds: float


class OfflineIn(BaseModel):
    hours: float


def build_app(system: System) -> FastAPI:
    app = FastAPI(title="iotchat", version="0.1.0")
    gateway = system.gateway
    fabric = system.fabric
    monitor = system.monitor

    @app.exception_handler(FabricError)
    def fabric_error(_request: Request, exc: FabricError):
        status = _STATUS.get(exc.code, 400)
        return JSONResponse(
            status_code=status, content={"error_code": exc.code, "message": exc.message}
        )

    # -- chat ---------------------------------------------------------------

    @app.post("/api/sessions")
    def open_session(body: SessionIn):
        return {"session_id": gateway.open_session(body.principal)}

    @app.get("/api/sessions/{session_id}")
    def session_info(session_id: str):
        session = gateway.session(session_id)
        return {
            "session_id": session.session_id,
            "principal": session.principal,
            "mode": session.mode,
            "expects_masked": gateway.expects_masked_reply(session),
        }

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageIn):
        messages = gateway.handle_utterance(session_id, body.text)
        return {"messages": [m.to_dict() for m in messages]}

    @app.get("/api/sessions/{session_id}/messages")
    def get_messages(
        session_id: str,
        since: int = Query(default=-1),
        wait: float = Query(default=0.0, le=25.0),
    ):
        deadline = time.monotonic() + wait
        while True:
            messages = gateway.messages_since(session_id, since)
            if messages or time.monotonic() >= deadline:
                return {"messages": [m.to_dict() for m in messages]}
            time.sleep(0.05)

    @app.get("/api/help")
    def help_text():
        return {"text": gateway.help_text()}

    @app.get("/api/nlu/entities")
    def nlu_entities(text: str):
        matches = gateway.engine.decode_entities(text)
        return {
            "tokens": normalize(text),
            "entities": [m.attributes for m in matches],
            "spans": [list(m.span) for m in matches],
        }

    @app.get("/api/nlu/parse")
    def nlu_parse(text: str, principal: str | None = None):
        who = principal or system.config.default_principal
        analysis = gateway.engine.parse(
            Utterance("inspect", text, 0),
            gateway.engine.new_contexts(),
            gateway._device_view(who),
        )
        result = analysis.result
        return {
            "tokens": analysis.tokens,
            "entities": [m.attributes for m in analysis.entities],
            "intent": analysis.intent_name,
            "score": analysis.score,
            "result_kind": type(result).__name__,
            "result": vars(result) if not hasattr(result, "consumed_entities") else {
                "action_name": result.action_name,
                "parameters": result.parameters,
                "matched_intent": result.matched_intent,
            },
        }

    # -- operator console ------------------------------------------------------

    @app.get("/api/operator/queue")
    def queue():
        return {"sessions": gateway.operator_queue()}

    @app.post("/api/operator/sessions/{session_id}/takeover")
    def takeover(session_id: str, body: OperatorIn):
        gateway.take_over(body.operator, session_id)
        return {"ok": True}

    @app.post("/api/operator/sessions/{session_id}/reply")
    def operator_reply(session_id: str, body: OperatorReplyIn):
        message = gateway.operator_send(body.operator, session_id, body.text)
        return {"message": message.to_dict()}

    @app.post("/api/operator/sessions/{session_id}/release")
    def release(session_id: str, body: OperatorIn):
        gateway.release(body.operator, session_id)
        return {"ok": True}

    @app.post("/api/operator/repair")
    def repair(body: RepairIn):
        return {"device": gateway.remote_repair(body.operator, body.serial)}

    # -- error reports -----------------------------------------------------------

    @app.post("/api/reports")
    def create_report(body: ReportIn):
        return gateway.report_error(body.serial, body.issue).to_dict()

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str):
        return gateway.get_report(report_id).to_dict()

    # -- device fleet ---------------------------------------------------------------

    @app.get("/devices")
    def list_devices(
        principal: str,
        kind: str | None = Query(default=None),
        location: str | None = Query(default=None),
    ):
        devices = fabric.discover(kind=kind, location=location, requester=principal)
        return {"devices": [fabric.describe(d.serial_id) for d in devices]}

    @app.get("/devices/{serial}")
    def get_device(serial: str):
        return fabric.describe(serial)

    @app.post("/devices/{serial}/actions")
    def invoke(serial: str, body: ActionIn):
        return fabric.invoke(serial, body.action, body.params, body.principal)

    @app.post("/devices/{serial}/config")
    def configure(serial: str, body: ConfigIn):
        remaining = fabric.configure(serial, body.field, body.value)
        return {"remaining": remaining}

    @app.post("/clock/advance")
    def advance(body: AdvanceIn):
        gateway.advance_clock(body.seconds)
        return {"now": fabric.now}

    @app.post("/devices/{serial}/offline")
    def schedule_offline(serial: str, body: OfflineIn):
        # Test hook, like /clock/advance: script an outage starting now.
        fabric.add_offline_window(serial, fabric.now, fabric.now + body.hours * 3600)
        return {"device": fabric.describe(serial)}

    # -- monitoring --------------------------------------------------------------------

    @app.get("/monitor/uptime/{serial}")
    def uptime(
        serial: str,
        window_from: float = Query(alias="from"),
        window_to: float = Query(alias="to"),
    ):
        return monitor.uptime(serial, window_from, window_to)

    @app.get("/monitor/report")
    def monitor_report(
        window_from: float = Query(alias="from"),
        window_to: float = Query(alias="to"),
    ):
        return monitor.report(window_from, window_to)

    return app
