"""Heartbeat monitoring, uptime accounting, alerts, and query statistics."""

import json
import threading
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from iotchat.fabric import Fabric, FabricError, NOT_FOUND

DEFAULT_HEARTBEAT_TIMEOUT = 120.0  # simulated seconds without a beat = offline
DEFAULT_OFFLINE_THRESHOLD = 86400.0  # alert once an outage exceeds 24 hours


@dataclass
class AvailabilityWindow:
    serial_id: str
    status: str  # online | offline
    start: float
    end: float | None = None  # None while the window is still open


@dataclass
class AlertEvent:
    alert_id: str
    serial_id: str
    rule: str
    offline_since: float
    fired_at: float


@dataclass
class _DeviceTrack:
    windows: list[AvailabilityWindow] = field(default_factory=list)
    alerted_episode: float | None = None  # offline_since of the episode already alerted


class Monitor:
    """Polls device heartbeats over the simulated clock.

    A device counts as offline when ``now - last_seen`` exceeds the heartbeat
    timeout. Window edges are backdated to heartbeat timestamps, so a
    detection delay never distorts the accounting: the offline window starts
    at the last beat before the gap and ends at the first beat after it.
    """

    def __init__(
        self,
        fabric: Fabric,
        heartbeat_timeout: float = DEFAULT_HEARTBEAT_TIMEOUT,
        offline_threshold: float = DEFAULT_OFFLINE_THRESHOLD,
    ):
        self.fabric = fabric
        self.heartbeat_timeout = heartbeat_timeout
        self.offline_threshold = offline_threshold
        self.tracks: dict[str, _DeviceTrack] = {}
        self.alerts: list[AlertEvent] = []
        self.observed_until: float | None = None
        self.query_counts: Counter = Counter()  # (principal, intent) -> count
        self._lock = threading.Lock()
        self._alert_seq = 0

    # -- polling -----------------------------------------------------------

    def poll(self, now: float | None = None) -> list[AlertEvent]:
        """Refresh availability windows; return alerts fired by this poll."""
        with self._lock:
            if now is None:
                now = self.fabric.now
            if self.observed_until is not None and now < self.observed_until:
                raise ValueError("poll time moved backwards")
            fired: list[AlertEvent] = []
            timeout = self.heartbeat_timeout
            threshold = self.offline_threshold
            tracks = self.tracks
            for device in self.fabric.devices_in_order():
                serial = device.serial_id
                track = tracks.get(serial)
                if track is None:
                    track = _DeviceTrack(
                        windows=[AvailabilityWindow(serial, "online", device.registered_at)]
                    )
                    tracks[serial] = track
                offline = (now - device.last_seen) > timeout
                current = track.windows[-1]
                if offline:
                    if current.status == "online":
                        self._flip(track, "offline", device.last_seen)
                    episode_start = track.windows[-1].start
                    if (
                        now - episode_start > threshold
                        and track.alerted_episode != episode_start
                    ):
                        track.alerted_episode = episode_start
                        self._alert_seq += 1
                        alert = AlertEvent(
                            alert_id=f"a-{self._alert_seq}",
                            serial_id=serial,
                            rule="offline_threshold",
                            offline_since=episode_start,
                            fired_at=now,
                        )
                        self.alerts.append(alert)
                        fired.append(alert)
                elif current.status == "offline":
                    self._flip(track, "online", device.last_seen)
                    track.alerted_episode = None
            self.observed_until = now
            return fired

    @staticmethod
    def _flip(track: _DeviceTrack, status: str, edge: float) -> None:
        current = track.windows[-1]
        if edge <= current.start:
            # The whole current window is overwritten (e.g. offline from the
            # very first observation); keep windows non-empty and alternating.
            current.status = status
            return
        current.end = edge
        track.windows.append(AvailabilityWindow(current.serial_id, status, edge))

    # -- uptime ------------------------------------------------------------

    def uptime(self, serial: str, window_from: float, window_to: float) -> dict:
        """Exact uptime/downtime split of [window_from, window_to)."""
        with self._lock:
            return self._uptime_locked(serial, window_from, window_to)

    def _uptime_locked(self, serial: str, window_from: float, window_to: float) -> dict:
        track = self.tracks.get(serial)
        if track is None:
            raise FabricError(NOT_FOUND, f"no observations for {serial!r}")
        if window_from >= window_to:
            raise FabricError(NOT_FOUND, "empty uptime window")
        first = track.windows[0].start
        last = self.observed_until if self.observed_until is not None else first
        if window_from < first or window_to > last:
            raise FabricError(
                NOT_FOUND,
                f"window [{window_from}, {window_to}) outside observed history "
                f"[{first}, {last}]",
            )
        up = 0.0
        for w in track.windows:
            end = w.end if w.end is not None else last
            overlap = min(end, window_to) - max(w.start, window_from)
            if overlap > 0 and w.status == "online":
                up += overlap
        total = window_to - window_from
        return {"uptime_s": up, "downtime_s": total - up}

    # -- query stats ---------------------------------------------------------

    def record_query(self, principal: str, intent_name: str) -> None:
        with self._lock:
            self.query_counts[(principal, intent_name)] += 1

    def top_intents(self, principal: str, k: int) -> list[str]:
        """Most frequent intents for a principal, count desc then name asc."""
        with self._lock:
            mine = [
                (-count, intent)
                for (who, intent), count in self.query_counts.items()
                if who == principal and count > 0
            ]
            mine.sort()
            return [intent for _neg, intent in mine[: max(k, 0)]]

    def snapshot_stats(self, path: str | Path) -> None:
        """Dump query counts as JSON; meant as a shutdown hook."""
        with self._lock:
            rows = [
                {"principal": who, "intent": intent, "count": count}
                for (who, intent), count in sorted(self.query_counts.items())
            ]
        Path(path).write_text(json.dumps(rows, indent=2), encoding="utf-8")

    # -- reporting -----------------------------------------------------------

    def report(self, window_from: float, window_to: float) -> dict:
        """Uptime percentages, alerts, and query totals over a window."""
        with self._lock:
            devices = []
            for serial in sorted(self.tracks):
                track = self.tracks[serial]
                first = track.windows[0].start
                last = self.observed_until if self.observed_until is not None else first
                lo = max(window_from, first)
                hi = min(window_to, last)
                if lo >= hi:
                    continue
                split = self._uptime_locked(serial, lo, hi)
                total = split["uptime_s"] + split["downtime_s"]
                devices.append(
                    {
                        "serial": serial,
                        "uptime_s": split["uptime_s"],
                        "downtime_s": split["downtime_s"],
                        "uptime_pct": round(100.0 * split["uptime_s"] / total, 2),
                    }
                )
            alerts = sorted(
                (a for a in self.alerts if window_from <= a.fired_at < window_to),
                key=lambda a: (a.serial_id, a.fired_at),
            )
            totals: Counter = Counter()
            for (_who, intent), count in self.query_counts.items():
                totals[intent] += count
            ranked = sorted(((-c, i) for i, c in totals.items()))
            top = [intent for _neg, intent in ranked[:3]]
            return {
                "from": window_from,
                "to": window_to,
                "devices": devices,
                "alerts": [vars(a) for a in alerts],
                "top_intents": top,
            }
