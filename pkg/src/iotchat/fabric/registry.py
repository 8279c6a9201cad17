"""The simulated fleet: registry, discovery, control, and the clock."""

import threading
from dataclasses import dataclass, field

from iotchat.fabric.devices import (
    DRIFT_C_PER_MIN,
    CarState,
    DeviceClass,
    DeviceInstance,
    KettleState,
    LightState,
    LockState,
    ThermostatState,
    apply_action,
    digest_secret,
    public_state,
)
from iotchat.fabric.errors import (
    DEVICE_OFFLINE,
    FORBIDDEN,
    FabricError,
    NOT_FOUND,
    SCHEMA_ORDER,
    UNSUPPORTED_ACTION,
)

# Kettle heating/cooling rates, degrees C per simulated minute.
KETTLE_HEAT_PER_MIN = 2.0
KETTLE_COOL_PER_MIN = 1.0
KETTLE_AMBIENT = 20.0
KETTLE_MAX = 100.0


@dataclass
class OfflineWindow:
    serial_id: str
    start: float
    end: float

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError("offline window must satisfy start < end")


@dataclass
class Environment:
    outside_temp: float = 17.0
    clock: float = 0.0
    script: list[OfflineWindow] = field(default_factory=list)


class Fabric:
    """Thread-safe device registry over a simulated clock.

    All mutation goes through one lock, which is a strictly stronger
    guarantee than the required per-device serialization and keeps ticks
    from interleaving with in-flight commands.
    """

    def __init__(self, environment: Environment | None = None, permissions: dict | None = None):
        self.env = environment or Environment()
        self.classes: dict[str, DeviceClass] = {}
        self.devices: dict[str, DeviceInstance] = {}
        # principal -> list of (kind, location) pairs; "*" matches anything.
        self.permissions: dict[str, list[tuple[str, str]]] = {}
        for principal, pairs in (permissions or {}).items():
            self.permissions[principal] = [(k, loc) for k, loc in pairs]
        self._windows_by_serial: dict[str, list[OfflineWindow]] = {}
        for window in self.env.script:
            self._windows_by_serial.setdefault(window.serial_id, []).append(window)
        self._lock = threading.RLock()

    # -- setup ------------------------------------------------------------

    def add_class(self, cls: DeviceClass) -> None:
        with self._lock:
            if cls.class_id in self.classes:
                raise FabricError(SCHEMA_ORDER, f"class {cls.class_id!r} already registered")
            self.classes[cls.class_id] = cls

    def register_device(self, instance: DeviceInstance) -> str:
        with self._lock:
            cls = self.classes.get(instance.class_id)
            if cls is None:
                raise FabricError(NOT_FOUND, f"unknown device class {instance.class_id!r}")
            if instance.serial_id in self.devices:
                raise FabricError(SCHEMA_ORDER, f"serial {instance.serial_id!r} already registered")
            self._check_state_kind(instance, cls)
            instance.registered_at = self.env.clock
            instance.last_seen = self.env.clock
            if not cls.config_schema:
                instance.configured = True
            instance.online = not self._scripted_offline(instance.serial_id, self.env.clock)
            self.devices[instance.serial_id] = instance
            return instance.serial_id

    @staticmethod
    def _check_state_kind(instance: DeviceInstance, cls: DeviceClass) -> None:
        expected = {
            "light": LightState,
            "thermostat": ThermostatState,
            "lock": LockState,
            "car": CarState,
            "kettle": KettleState,
        }[cls.kind]
        if not isinstance(instance.state, expected):
            raise FabricError(
                UNSUPPORTED_ACTION,
                f"state of {instance.serial_id!r} does not match kind {cls.kind!r}",
            )

    # -- availability ------------------------------------------------------

    def add_offline_window(self, serial: str, start: float, end: float) -> None:
        with self._lock:
            if serial not in self.devices:
                raise FabricError(NOT_FOUND, f"unknown device {serial!r}")
            window = OfflineWindow(serial, start, end)
            self.env.script.append(window)
            self._windows_by_serial.setdefault(serial, []).append(window)

    def _scripted_offline(self, serial: str, t: float) -> bool:
        return any(
            w.start <= t < w.end for w in self._windows_by_serial.get(serial, ())
        )

    def _containing_window(self, serial: str, t: float) -> OfflineWindow | None:
        """Window the instant ``t`` falls strictly inside, if any.

        Boundary instants do not count: a device still manages a heartbeat
        at the exact moment it drops off, and beats again the moment it
        returns, which keeps availability accounting exact.
        """
        for w in self._windows_by_serial.get(serial, ()):
            if w.start < t < w.end:
                return w
        return None

    def script_boundaries(self, lo: float, hi: float) -> list[float]:
        """Script edges inside (lo, hi], for clock advances to split on."""
        edges = set()
        for w in self.env.script:
            for t in (w.start, w.end):
                if lo < t <= hi:
                    edges.add(t)
        return sorted(edges)

    def remote_repair(self, serial: str) -> dict:
        """Clear an active scripted fault and force the device online now."""
        with self._lock:
            device = self._require(serial)
            now = self.env.clock
            for w in self.env.script:
                if w.serial_id == serial and w.start <= now < w.end:
                    w.end = now
            device.last_seen = now
            device.online = True
            return self.describe(serial)

    # -- permissions -------------------------------------------------------

    def principal_known(self, principal: str) -> bool:
        return principal in self.permissions

    def visible(self, principal: str, kind: str, location: str) -> bool:
        pairs = self.permissions.get(principal)
        if pairs is None:
            return False
        return any(
            (pk in ("*", kind)) and (pl in ("*", location)) for pk, pl in pairs
        )

    # -- queries -----------------------------------------------------------

    @property
    def now(self) -> float:
        return self.env.clock

    def _require(self, serial: str) -> DeviceInstance:
        device = self.devices.get(serial)
        if device is None:
            raise FabricError(NOT_FOUND, f"unknown device {serial!r}")
        return device

    def cls_of(self, device: DeviceInstance) -> DeviceClass:
        return self.classes[device.class_id]

    def devices_in_order(self) -> list[DeviceInstance]:
        return list(self.devices.values())

    def discover(
        self,
        kind: str | None = None,
        location: str | None = None,
        requester: str = "",
    ) -> list[DeviceInstance]:
        with self._lock:
            if not self.principal_known(requester):
                raise FabricError(FORBIDDEN, f"unknown principal {requester!r}")
            found = []
            for device in self.devices.values():
                cls = self.cls_of(device)
                if kind is not None and cls.kind != kind:
                    continue
                if location is not None and device.location != location:
                    continue
                if not self.visible(requester, cls.kind, device.location):
                    continue
                found.append(device)
            return found

    def describe(self, serial: str) -> dict:
        with self._lock:
            device = self._require(serial)
            cls = self.cls_of(device)
            return {
                "serial": device.serial_id,
                "class_id": device.class_id,
                "kind": cls.kind,
                "name": device.friendly_name,
                "location": device.location,
                "vendor": cls.vendor,
                "online": not self._scripted_offline(serial, self.env.clock),
                "configured": device.configured,
                "last_seen": device.last_seen,
                "state": public_state(device.state),
            }

    # -- control -----------------------------------------------------------

    def invoke(self, serial: str, action: str, params: dict, requester: str) -> dict:
        with self._lock:
            device = self._require(serial)
            cls = self.cls_of(device)
            if not self.principal_known(requester) or not self.visible(
                requester, cls.kind, device.location
            ):
                raise FabricError(FORBIDDEN, f"{requester!r} may not control {serial!r}")
            if self._scripted_offline(serial, self.env.clock):
                raise FabricError(DEVICE_OFFLINE, f"{device.friendly_name} is offline")
            if action not in cls.capabilities:
                raise FabricError(UNSUPPORTED_ACTION, f"{cls.kind} does not support {action}")
            result, mutated = apply_action(device, cls, action, params, self.env.outside_temp)
            if mutated:
                device.mutations += 1
            return result

    def configure(self, serial: str, field_name: str, value: str) -> list[str]:
        """Store the next setup value; returns the field names still pending."""
        with self._lock:
            device = self._require(serial)
            cls = self.cls_of(device)
            if self._scripted_offline(serial, self.env.clock):
                raise FabricError(DEVICE_OFFLINE, f"{device.friendly_name} is offline")
            schema = cls.config_schema
            if not schema:
                raise FabricError(SCHEMA_ORDER, f"{device.friendly_name} takes no configuration")
            if device.configured and field_name == schema[0].name:
                device.config_progress = 0  # reconfiguration restarts the schema
            expected = schema[device.config_progress] if device.config_progress < len(schema) else None
            if expected is None or field_name != expected.name:
                want = expected.name if expected else schema[0].name
                raise FabricError(
                    SCHEMA_ORDER, f"expected field {want!r} next, got {field_name!r}"
                )
            stored = digest_secret(value) if expected.masked else value
            if isinstance(device.state, LockState) and field_name == "passcode":
                device.state.passcode_digest = stored
            else:
                device.config_values[field_name] = stored
            device.config_progress += 1
            device.mutations += 1
            if device.config_progress >= len(schema):
                device.configured = True
            return [f.name for f in schema[device.config_progress :]]

    # -- time --------------------------------------------------------------

    def tick(self, dt: float) -> None:
        """Advance the simulated clock and every continuous device model."""
        if dt <= 0:
            raise ValueError("tick needs dt > 0")
        with self._lock:
            self.env.clock += dt
            now = self.env.clock
            minutes = dt / 60.0
            windows = self._windows_by_serial
            for device in self.devices.values():
                state = device.state
                if isinstance(state, CarState):
                    if state.charging and state.battery_pct < 100.0:
                        gain = dt / float(60 * state.minutes_per_percent)
                        state.battery_pct = min(100.0, state.battery_pct + gain)
                elif isinstance(state, ThermostatState):
                    if state.current_temp != state.setpoint:
                        step = DRIFT_C_PER_MIN * minutes
                        delta = state.setpoint - state.current_temp
                        if abs(delta) <= step:
                            state.current_temp = state.setpoint
                        else:
                            state.current_temp += step if delta > 0 else -step
                elif isinstance(state, KettleState):
                    if state.power == "on":
                        if state.water_temp < KETTLE_MAX:
                            state.water_temp = min(
                                KETTLE_MAX, state.water_temp + KETTLE_HEAT_PER_MIN * minutes
                            )
                    elif state.water_temp > KETTLE_AMBIENT:
                        state.water_temp = max(
                            KETTLE_AMBIENT, state.water_temp - KETTLE_COOL_PER_MIN * minutes
                        )

                serial_windows = windows.get(device.serial_id)
                if not serial_windows:
                    device.last_seen = now
                    device.online = True
                    continue
                for window in serial_windows:
                    if window.start < now < window.end:
                        if window.start > device.last_seen:
                            device.last_seen = window.start
                        device.online = False
                        break
                else:
                    device.last_seen = now
                    device.online = True
