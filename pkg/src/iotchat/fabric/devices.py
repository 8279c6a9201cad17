"""Device classes, per-kind state, and the state transitions behind actions."""

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction

from iotchat.fabric.errors import (
    FabricError,
    NOT_CONFIGURED,
    UNSUPPORTED_ACTION,
)

KINDS = ("light", "thermostat", "lock", "car", "kettle")

SETPOINT_MIN = 5.0
SETPOINT_MAX = 35.0

COMFORT_MIN = 18.0
COMFORT_MAX = 26.0

# Thermostat room drift toward the setpoint, per simulated minute.
DRIFT_C_PER_MIN = 0.5

DEFAULT_MINUTES_PER_PERCENT = Fraction(19, 6)


@dataclass(frozen=True)
class ConfigField:
    name: str
    prompt: str
    masked: bool = False


@dataclass(frozen=True)
class DeviceClass:
    class_id: str
    kind: str
    capabilities: tuple[str, ...]
    config_schema: tuple[ConfigField, ...] = ()
    vendor: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown device kind {self.kind!r}")
        if not self.capabilities:
            raise ValueError(f"class {self.class_id!r} has no capabilities")
        if self.kind == "lock":
            masked_fields = [f.name for f in self.config_schema if f.masked]
            if "passcode" not in masked_fields:
                raise ValueError("lock classes need a masked 'passcode' config field")


@dataclass
class LightState:
    power: str = "off"  # on | off


@dataclass
class ThermostatState:
    current_temp: float = 20.0
    setpoint: float = 20.0
    mode: str = "auto"


@dataclass
class LockState:
    locked: bool = False
    passcode_digest: str | None = None


@dataclass
class CarState:
    battery_pct: float = 100.0
    charging: bool = False
    minutes_per_percent: Fraction = DEFAULT_MINUTES_PER_PERCENT


@dataclass
class KettleState:
    power: str = "off"
    water_temp: float = 20.0


DeviceState = LightState | ThermostatState | LockState | CarState | KettleState

_STATE_TYPES = {
    "light": LightState,
    "thermostat": ThermostatState,
    "lock": LockState,
    "car": CarState,
    "kettle": KettleState,
}


def state_for_kind(kind: str, raw: dict | None = None) -> DeviceState:
    """Build a state variant from config values, validating ranges."""
    raw = dict(raw or {})
    if kind == "car" and "minutes_per_percent" in raw:
        raw["minutes_per_percent"] = Fraction(str(raw["minutes_per_percent"]))
    state = _STATE_TYPES[kind](**raw)
    if isinstance(state, CarState):
        if not 0.0 <= state.battery_pct <= 100.0:
            raise ValueError("battery_pct must be within [0, 100]")
        if state.minutes_per_percent <= 0:
            raise ValueError("minutes_per_percent must be positive")
    if isinstance(state, ThermostatState):
        if not SETPOINT_MIN <= state.setpoint <= SETPOINT_MAX:
            raise ValueError(f"setpoint must be within [{SETPOINT_MIN}, {SETPOINT_MAX}]")
    return state


def public_state(state: DeviceState) -> dict:
    """State as exposed over any interface. Never includes secrets."""
    if isinstance(state, LightState):
        return {"power": state.power}
    if isinstance(state, ThermostatState):
        return {
            "current_temp": round(state.current_temp, 4),
            "setpoint": state.setpoint,
            "mode": state.mode,
        }
    if isinstance(state, LockState):
        return {"locked": state.locked}
    if isinstance(state, CarState):
        return {
            "battery_pct": round(state.battery_pct, 6),
            "charging": state.charging,
            "minutes_per_percent": str(state.minutes_per_percent),
        }
    if isinstance(state, KettleState):
        return {"power": state.power, "water_temp": round(state.water_temp, 4)}
    raise TypeError(f"unknown state {state!r}")


@dataclass
class DeviceInstance:
    serial_id: str
    class_id: str
    friendly_name: str
    location: str
    state: DeviceState
    online: bool = True
    last_seen: float = 0.0
    configured: bool = False
    registered_at: float = 0.0
    config_progress: int = 0
    config_values: dict = field(default_factory=dict)
    mutations: int = field(default=0, repr=False)  # observability for safety tests


def comfort_setpoint(outside_temp: float) -> float:
    """Comfortable indoor setpoint for the current outside temperature.

    Affine in the outside reading, clamped to the comfort band, one-decimal
    rounding. Illustrative policy, not HVAC science.
    """
    raw = 18.0 + 0.2 * outside_temp
    return round(min(COMFORT_MAX, max(COMFORT_MIN, raw)), 1)


def time_to_full(state: CarState) -> int:
    """Whole minutes until the battery reaches 100% at the charging rate."""
    if state.battery_pct >= 100.0:
        return 0
    remaining = Fraction(100) - Fraction(state.battery_pct)
    return math.ceil(remaining * state.minutes_per_percent)


def digest_secret(value: str) -> str:
    return hashlib.sha256(value.encode("utf-8")).hexdigest()


def _clamp_setpoint(value: float) -> float:
    return round(min(SETPOINT_MAX, max(SETPOINT_MIN, value)), 1)


def apply_action(
    device: DeviceInstance,
    cls: DeviceClass,
    action: str,
    params: dict,
    outside_temp: float,
) -> tuple[dict, bool]:
    """Apply ``action`` to the device, returning (result, mutated).

    The result echoes the new observable state plus whatever the reply
    templates need. Raises FabricError for unsupported or premature actions.
    """
    state = device.state
    base = {"serial": device.serial_id, "name": device.friendly_name, "location": device.location}

    if action == "smartHome.getStatus":
        return {**base, "kind": cls.kind, **public_state(state)}, False

    if isinstance(state, LightState):
        if action == "smartHome.lightsOn":
            state.power = "on"
            return {**base, "power": "on"}, True
        if action == "smartHome.lightsOff":
            state.power = "off"
            return {**base, "power": "off"}, True

    elif isinstance(state, ThermostatState):
        if action == "smartHome.setComfort":
            state.setpoint = comfort_setpoint(outside_temp)
            return {**base, "setpoint": state.setpoint, "outside": outside_temp}, True
        if action == "smartHome.adjustTemperature":
            change = params.get("change")
            if not isinstance(change, (int, float)):
                raise FabricError(UNSUPPORTED_ACTION, "adjustTemperature needs a numeric 'change'")
            state.setpoint = _clamp_setpoint(state.setpoint + change)
            return {**base, "setpoint": state.setpoint}, True
        if action == "smartHome.setSetpoint":
            target = params.get("setpoint")
            if not isinstance(target, (int, float)):
                raise FabricError(UNSUPPORTED_ACTION, "setSetpoint needs a numeric 'setpoint'")
            state.setpoint = _clamp_setpoint(float(target))
            return {**base, "setpoint": state.setpoint}, True

    elif isinstance(state, LockState):
        if action in ("smartHome.doorLock", "smartHome.doorUnlock"):
            if not device.configured:
                raise FabricError(
                    NOT_CONFIGURED, f"{device.friendly_name} must be set up before locking"
                )
            state.locked = action == "smartHome.doorLock"
            return {**base, "locked": state.locked}, True

    elif isinstance(state, CarState):
        if action == "car.getChargeStatus":
            return {
                **base,
                "battery_pct": state.battery_pct,
                "charging": state.charging,
                "minutes_to_full": time_to_full(state),
            }, False
        if action == "car.startCharging":
            state.charging = True
            return {**base, "charging": True}, True
        if action == "car.stopCharging":
            state.charging = False
            return {**base, "charging": False}, True

    elif isinstance(state, KettleState):
        if action == "kettle.on":
            state.power = "on"
            return {**base, "power": "on"}, True
        if action == "kettle.off":
            state.power = "off"
            return {**base, "power": "off"}, True

    raise FabricError(UNSUPPORTED_ACTION, f"{cls.kind} does not implement {action}")
