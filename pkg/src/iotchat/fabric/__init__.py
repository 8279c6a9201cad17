"""Simulated IoT fleet with class/serial identity and a REST-shaped API."""

from iotchat.fabric.devices import (
    CarState,
    ConfigField,
    DeviceClass,
    DeviceInstance,
    KettleState,
    LightState,
    LockState,
    ThermostatState,
    apply_action,
    comfort_setpoint,
    digest_secret,
    public_state,
    state_for_kind,
    time_to_full,
)
from iotchat.fabric.errors import (
    CONFLICT,
    DEVICE_OFFLINE,
    FORBIDDEN,
    FabricError,
    NOT_CONFIGURED,
    NOT_FOUND,
    SCHEMA_ORDER,
    UNSUPPORTED_ACTION,
)
from iotchat.fabric.registry import Environment, Fabric, OfflineWindow

__all__ = [
    "CONFLICT",
    "CarState",
    "ConfigField",
    "DEVICE_OFFLINE",
    "DeviceClass",
    "DeviceInstance",
    "Environment",
    "FORBIDDEN",
    "Fabric",
    "FabricError",
    "KettleState",
    "LightState",
    "LockState",
    "NOT_CONFIGURED",
    "NOT_FOUND",
    "OfflineWindow",
    "SCHEMA_ORDER",
    "ThermostatState",
    "UNSUPPORTED_ACTION",
    "apply_action",
    "comfort_setpoint",
    "digest_secret",
    "public_state",
    "state_for_kind",
    "time_to_full",
]
