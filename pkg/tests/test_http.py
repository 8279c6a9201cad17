import pytest
from fastapi.testclient import TestClient

from iotchat.http_api import build_app

HOUR = 3600


@pytest.fixture()
def client(system):
    return TestClient(build_app(system))


def open_session(client, principal="alice"):
    response = client.post("/api/sessions", json={"principal": principal})
    assert response.status_code == 200
    return response.json()["session_id"]


class TestChatApi:
    def test_message_round_trip(self, client):
        sid = open_session(client)
        response = client.post(
            f"/api/sessions/{sid}/messages",
            json={"text": "How much is my car charged?"},
        )
        texts = [m["text"] for m in response.json()["messages"] if m["author"] == "bot"]
        assert texts == [
            "The Tesla Model S is currently 40% charged. 3 Hours 10 minutes to full charge."
        ]

    def test_unknown_principal_403(self, client):
        response = client.post("/api/sessions", json={"principal": "stranger"})
        assert response.status_code == 403
        assert response.json()["error_code"] == "Forbidden"

    def test_unknown_session_404(self, client):
        response = client.post("/api/sessions/s-999/messages", json={"text": "hi"})
        assert response.status_code == 404

    def test_cursor_poll_returns_only_new_messages(self, client):
        sid = open_session(client)
        first = client.post(f"/api/sessions/{sid}/messages", json={"text": "help"}).json()
        last_cursor = first["messages"][-1]["cursor"]
        empty = client.get(f"/api/sessions/{sid}/messages", params={"since": last_cursor})
        assert empty.json()["messages"] == []
        client.post(f"/api/sessions/{sid}/messages", json={"text": "help"})
        tail = client.get(f"/api/sessions/{sid}/messages", params={"since": last_cursor})
        assert len(tail.json()["messages"]) == 2  # user echo + reply

    def test_options_surface_in_payload(self, client):
        sid = open_session(client)
        response = client.post(
            f"/api/sessions/{sid}/messages",
            json={"text": "Turn the light on in the guest bedroom"},
        )
        bot = [m for m in response.json()["messages"] if m["author"] == "bot"][0]
        assert bot["options"] == ["Lamp", "Table Light"]

    def test_masked_message_never_leaks(self, client):
        sid = open_session(client)
        for text in ("Help me setup my new device", "1"):
            client.post(f"/api/sessions/{sid}/messages", json={"text": text})
        echo = client.post(f"/api/sessions/{sid}/messages", json={"text": "2468"}).json()
        users = [m for m in echo["messages"] if m["author"] == "user"]
        assert users[0]["masked"] and users[0]["text"] == "*****"
        everything = client.get(f"/api/sessions/{sid}/messages", params={"since": -1}).json()
        assert "2468" not in str(everything)

    def test_help_endpoint(self, client):
        response = client.get("/api/help")
        assert response.json()["text"].startswith("Here is what I can help you with:")

    def test_entity_inspection_endpoint(self, client):
        response = client.get("/api/nlu/entities", params={"text": "heating"})
        assert response.json()["entities"] == [{"type": "iot", "device": "Thermostat"}]
        response = client.get("/api/nlu/entities", params={"text": "$15"})
        assert response.json()["entities"] == [
            {"type": "money", "amount": 15, "currency": "dollars"}
        ]


class TestOperatorApi:
    def escalated_session(self, client):
        sid = open_session(client)
        client.post("/clock/advance", json={"seconds": 1})  # make time move a little
        client.post(f"/api/sessions/{sid}/messages", json={"text": "hi"})
        return sid

    def test_full_escalation_lifecycle(self, client, system):
        sid = self.escalated_session(client)
        system.gateway.escalate(system.gateway.session(sid))

        queue = client.get("/api/operator/queue").json()["sessions"]
        assert [q["session_id"] for q in queue] == [sid]

        assert client.post(
            f"/api/operator/sessions/{sid}/takeover", json={"operator": "sam"}
        ).status_code == 200

        reply = client.post(
            f"/api/operator/sessions/{sid}/reply",
            json={"operator": "sam", "text": "I will try to resolve it remotely."},
        ).json()["message"]
        assert reply["author"] == "operator"

        assert client.post(
            f"/api/operator/sessions/{sid}/release", json={"operator": "sam"}
        ).status_code == 200

    def test_takeover_conflict(self, client):
        sid = self.escalated_session(client)
        response = client.post(
            f"/api/operator/sessions/{sid}/takeover", json={"operator": "sam"}
        )
        assert response.status_code == 409
        assert response.json()["error_code"] == "Conflict"

    def test_reply_without_hold_forbidden(self, client):
        sid = self.escalated_session(client)
        response = client.post(
            f"/api/operator/sessions/{sid}/reply", json={"operator": "sam", "text": "x"}
        )
        assert response.status_code == 403

    def test_remote_repair(self, client, system):
        system.fabric.add_offline_window("lock-1", 0, 10 * HOUR)
        client.post("/clock/advance", json={"seconds": 600})
        response = client.post(
            "/api/operator/repair", json={"operator": "sam", "serial": "lock-1"}
        )
        assert response.json()["device"]["online"] is True


class TestReportsApi:
    def test_create_and_fetch(self, client):
        created = client.post(
            "/api/reports", json={"serial": "lock-1", "issue": "jammed"}
        ).json()
        assert created["stakeholder"] == "Smart Lock Vendor"
        fetched = client.get(f"/api/reports/{created['report_id']}").json()
        assert fetched == created

    def test_unknown_device_404(self, client):
        response = client.post("/api/reports", json={"serial": "ghost", "issue": "?"})
        assert response.status_code == 404


class TestDeviceApi:
    def test_discovery_with_filters(self, client):
        response = client.get(
            "/devices",
            params={"principal": "alice", "kind": "light", "location": "guest bedroom"},
        )
        names = [d["name"] for d in response.json()["devices"]]
        assert names == ["Lamp", "Table Light"]

    def test_no_permission_empty(self, client):
        response = client.get("/devices", params={"principal": "nobody"})
        assert response.json()["devices"] == []

    def test_single_device_fetch(self, client):
        response = client.get("/devices/car-1")
        body = response.json()
        assert body["name"] == "Tesla Model S"
        assert body["state"]["battery_pct"] == 40.0

    def test_action_endpoint(self, client, system):
        response = client.post(
            "/devices/light-1/actions",
            json={"action": "smartHome.lightsOn", "params": {}, "principal": "alice"},
        )
        assert response.json()["power"] == "on"
        assert system.fabric.devices["light-1"].state.power == "on"

    def test_action_error_codes(self, client, system):
        response = client.post(
            "/devices/light-1/actions",
            json={"action": "smartHome.doorLock", "params": {}, "principal": "alice"},
        )
        assert response.status_code == 400
        assert response.json()["error_code"] == "UnsupportedAction"

        response = client.post(
            "/devices/lock-1/actions",
            json={"action": "smartHome.doorLock", "params": {}, "principal": "alice"},
        )
        assert response.status_code == 409
        assert response.json()["error_code"] == "NotConfigured"

        system.fabric.add_offline_window("light-1", 0, HOUR)
        client.post("/clock/advance", json={"seconds": 60})
        response = client.post(
            "/devices/light-1/actions",
            json={"action": "smartHome.lightsOn", "params": {}, "principal": "alice"},
        )
        assert response.status_code == 409
        assert response.json()["error_code"] == "DeviceOffline"

    def test_config_endpoint(self, client):
        response = client.post(
            "/devices/lock-1/config", json={"field": "passcode", "value": "9999"}
        )
        assert response.json()["remaining"] == []
        response = client.post(
            "/devices/kettle-1/config", json={"field": "nonsense", "value": "x"}
        )
        assert response.status_code == 400
        assert response.json()["error_code"] == "SchemaOrder"


class TestMonitorApi:
    def test_uptime_endpoint(self, client, system):
        system.fabric.add_offline_window("lock-1", 6 * HOUR, 12 * HOUR)
        client.post("/clock/advance", json={"seconds": 24 * HOUR})
        response = client.get(
            "/monitor/uptime/lock-1", params={"from": 0, "to": 24 * HOUR}
        )
        assert response.json() == {"uptime_s": 64800.0, "downtime_s": 21600.0}

    def test_uptime_unknown_serial(self, client):
        client.post("/clock/advance", json={"seconds": 60})
        response = client.get("/monitor/uptime/ghost", params={"from": 0, "to": 10})
        assert response.status_code == 404

    def test_report_endpoint(self, client, system):
        system.fabric.add_offline_window("lock-1", 0, 30 * HOUR)
        client.post("/clock/advance", json={"seconds": 25 * HOUR})
        report = client.get("/monitor/report", params={"from": 0, "to": 25 * HOUR}).json()
        serials = [d["serial"] for d in report["devices"]]
        assert serials == sorted(serials)
        assert len(report["alerts"]) == 1
        assert report["alerts"][0]["serial_id"] == "lock-1"


class TestSessionStateAndHooks:
    def test_session_info_reports_masked_expectation(self, client):
        sid = open_session(client)
        info = client.get(f"/api/sessions/{sid}").json()
        assert info == {
            "session_id": sid,
            "principal": "alice",
            "mode": "bot",
            "expects_masked": False,
        }
        for text in ("Help me setup my new device", "1"):
            client.post(f"/api/sessions/{sid}/messages", json={"text": text})
        assert client.get(f"/api/sessions/{sid}").json()["expects_masked"] is True
        client.post(f"/api/sessions/{sid}/messages", json={"text": "2468"})
        assert client.get(f"/api/sessions/{sid}").json()["expects_masked"] is False

    def test_offline_hook_schedules_outage(self, client):
        client.post("/devices/lock-1/offline", json={"hours": 2})
        client.post("/clock/advance", json={"seconds": 60})
        assert client.get("/devices/lock-1").json()["online"] is False
        response = client.post(
            "/devices/lock-1/actions",
            json={"action": "smartHome.getStatus", "params": {}, "principal": "alice"},
        )
        assert response.status_code == 409

    def test_long_poll_returns_immediately_when_messages_exist(self, client):
        sid = open_session(client)
        client.post(f"/api/sessions/{sid}/messages", json={"text": "help"})
        import time

        started = time.perf_counter()
        got = client.get(
            f"/api/sessions/{sid}/messages", params={"since": -1, "wait": 5}
        ).json()["messages"]
        assert got
        assert time.perf_counter() - started < 1.0

    def test_long_poll_waits_then_gives_up_empty(self, client):
        sid = open_session(client)
        last = client.post(f"/api/sessions/{sid}/messages", json={"text": "help"}).json()[
            "messages"
        ][-1]["cursor"]
        import time

        started = time.perf_counter()
        got = client.get(
            f"/api/sessions/{sid}/messages", params={"since": last, "wait": 0.3}
        ).json()["messages"]
        elapsed = time.perf_counter() - started
        assert got == []
        assert 0.25 <= elapsed < 2.0
