import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest

from iotchat.fabric import (
    CarState,
    ConfigField,
    DeviceClass,
    DeviceInstance,
    Environment,
    Fabric,
    FabricError,
    LightState,
    LockState,
    ThermostatState,
    comfort_setpoint,
    public_state,
    state_for_kind,
    time_to_full,
)


def small_fabric():
    fabric = Fabric(Environment(outside_temp=17.0), permissions={"owner": [("*", "*")], "none": []})
    fabric.add_class(
        DeviceClass(
            "bulb", "light", ("smartHome.lightsOn", "smartHome.lightsOff", "smartHome.getStatus")
        )
    )
    fabric.add_class(
        DeviceClass(
            "thermo",
            "thermostat",
            ("smartHome.setComfort", "smartHome.adjustTemperature", "smartHome.setSetpoint", "smartHome.getStatus"),
        )
    )
    fabric.add_class(
        DeviceClass(
            "lock",
            "lock",
            ("smartHome.doorLock", "smartHome.doorUnlock", "smartHome.getStatus"),
            config_schema=(ConfigField("passcode", "Enter the passcode", masked=True),),
        )
    )
    fabric.add_class(
        DeviceClass(
            "car",
            "car",
            ("car.getChargeStatus", "car.startCharging", "car.stopCharging", "smartHome.getStatus"),
        )
    )
    return fabric


def register(fabric, serial, class_id, name, location, state):
    device = DeviceInstance(serial, class_id, name, location, state)
    fabric.register_device(device)
    return device


class TestRegistry:
    def test_register_then_discover_by_kind(self):
        fabric = small_fabric()
        register(fabric, "car-1", "car", "Tesla Model S", "garage", CarState(battery_pct=40))
        found = fabric.discover(kind="car", requester="owner")
        assert [d.serial_id for d in found] == ["car-1"]

    def test_two_lights_same_location_both_discoverable(self):
        fabric = small_fabric()
        register(fabric, "l-1", "bulb", "Lamp", "guest bedroom", LightState())
        register(fabric, "l-2", "bulb", "Table Light", "guest bedroom", LightState())
        found = fabric.discover(kind="light", location="guest bedroom", requester="owner")
        assert [d.friendly_name for d in found] == ["Lamp", "Table Light"]

    def test_duplicate_serial_rejected(self):
        fabric = small_fabric()
        register(fabric, "l-1", "bulb", "Lamp", "a", LightState())
        with pytest.raises(FabricError):
            register(fabric, "l-1", "bulb", "Copy", "b", LightState())

    def test_unknown_class_rejected(self):
        fabric = small_fabric()
        with pytest.raises(FabricError) as err:
            register(fabric, "x", "ghost", "X", "a", LightState())
        assert err.value.code == "NotFound"

    def test_state_kind_mismatch_rejected(self):
        fabric = small_fabric()
        with pytest.raises(FabricError):
            register(fabric, "x", "bulb", "X", "a", CarState())

    def test_no_permissions_sees_nothing(self):
        fabric = small_fabric()
        register(fabric, "l-1", "bulb", "Lamp", "a", LightState())
        assert fabric.discover(requester="none") == []

    def test_unknown_requester_forbidden(self):
        fabric = small_fabric()
        with pytest.raises(FabricError) as err:
            fabric.discover(requester="stranger")
        assert err.value.code == "Forbidden"

    def test_discovery_honours_kind_location_pairs(self):
        fabric = Fabric(permissions={"guest": [("light", "guest bedroom")]})
        fabric.add_class(DeviceClass("bulb", "light", ("smartHome.lightsOn",)))
        fabric.add_class(DeviceClass("lock", "lock", ("smartHome.doorLock",),
                                     config_schema=(ConfigField("passcode", "p", True),)))
        register(fabric, "l-1", "bulb", "Lamp", "guest bedroom", LightState())
        register(fabric, "l-2", "bulb", "Porch", "porch", LightState())
        register(fabric, "k-1", "lock", "Lock", "guest bedroom", LockState())
        found = fabric.discover(requester="guest")
        assert [d.serial_id for d in found] == ["l-1"]


class TestInvoke:
    def test_lights_on_both(self):
        fabric = small_fabric()
        register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        register(fabric, "l-2", "bulb", "Table Light", "gb", LightState())
        for serial in ("l-1", "l-2"):
            result = fabric.invoke(serial, "smartHome.lightsOn", {}, "owner")
            assert result["power"] == "on"
        assert fabric.devices["l-1"].state.power == "on"
        assert fabric.devices["l-2"].state.power == "on"

    def test_setpoint_applied(self):
        fabric = small_fabric()
        register(fabric, "t-1", "thermo", "T", "lr", ThermostatState(current_temp=17.0))
        result = fabric.invoke("t-1", "smartHome.setSetpoint", {"setpoint": 21.4}, "owner")
        assert result["setpoint"] == 21.4

    def test_offline_device_rejects_everything(self):
        fabric = small_fabric()
        register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        fabric.add_offline_window("l-1", 0.0, 100.0)
        with pytest.raises(FabricError) as err:
            fabric.invoke("l-1", "smartHome.lightsOn", {}, "owner")
        assert err.value.code == "DeviceOffline"
        assert fabric.devices["l-1"].state.power == "off"  # never mutated

    def test_unsupported_action(self):
        fabric = small_fabric()
        register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        with pytest.raises(FabricError) as err:
            fabric.invoke("l-1", "smartHome.doorLock", {}, "owner")
        assert err.value.code == "UnsupportedAction"

    def test_forbidden_for_invisible_device(self):
        fabric = small_fabric()
        register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        with pytest.raises(FabricError) as err:
            fabric.invoke("l-1", "smartHome.lightsOn", {}, "none")
        assert err.value.code == "Forbidden"

    def test_unconfigured_lock_rejects_locking(self):
        fabric = small_fabric()
        register(fabric, "k-1", "lock", "Smart Lock", "door", LockState())
        with pytest.raises(FabricError) as err:
            fabric.invoke("k-1", "smartHome.doorLock", {}, "owner")
        assert err.value.code == "NotConfigured"

    def test_unknown_device_not_found(self):
        fabric = small_fabric()
        with pytest.raises(FabricError) as err:
            fabric.invoke("ghost", "smartHome.lightsOn", {}, "owner")
        assert err.value.code == "NotFound"

    def test_concurrent_adjustments_serialize(self):
        fabric = small_fabric()
        register(fabric, "t-1", "thermo", "T", "lr", ThermostatState(setpoint=10.0))
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(
                pool.map(
                    lambda _: fabric.invoke(
                        "t-1", "smartHome.adjustTemperature", {"change": 1}, "owner"
                    ),
                    range(20),
                )
            )
        assert fabric.devices["t-1"].state.setpoint == 30.0


class TestConfigure:
    def test_lock_passcode_digest_then_configured(self):
        fabric = small_fabric()
        device = register(fabric, "k-1", "lock", "Smart Lock", "door", LockState())
        remaining = fabric.configure("k-1", "passcode", "2468")
        assert remaining == []
        assert device.configured
        assert device.state.passcode_digest is not None
        assert "2468" not in device.state.passcode_digest

    def test_digest_never_leaves_public_state(self):
        fabric = small_fabric()
        device = register(fabric, "k-1", "lock", "Smart Lock", "door", LockState())
        fabric.configure("k-1", "passcode", "2468")
        public = public_state(device.state)
        assert "passcode_digest" not in public
        assert "2468" not in str(fabric.describe("k-1"))

    def test_wrong_field_is_schema_order(self):
        fabric = small_fabric()
        register(fabric, "k-1", "lock", "Smart Lock", "door", LockState())
        with pytest.raises(FabricError) as err:
            fabric.configure("k-1", "wifi", "x")
        assert err.value.code == "SchemaOrder"

    def test_reconfiguration_restarts_schema(self):
        fabric = small_fabric()
        device = register(fabric, "k-1", "lock", "Smart Lock", "door", LockState())
        fabric.configure("k-1", "passcode", "1111")
        first = device.state.passcode_digest
        remaining = fabric.configure("k-1", "passcode", "2222")
        assert remaining == []
        assert device.configured
        assert device.state.passcode_digest != first

    def test_offline_device_cannot_be_configured(self):
        fabric = small_fabric()
        register(fabric, "k-1", "lock", "Smart Lock", "door", LockState())
        fabric.add_offline_window("k-1", 0.0, 50.0)
        with pytest.raises(FabricError) as err:
            fabric.configure("k-1", "passcode", "1")
        assert err.value.code == "DeviceOffline"

    def test_schemaless_class_is_born_configured(self):
        fabric = small_fabric()
        device = register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        assert device.configured


class TestChargeModel:
    def test_fig_rate_reproduces_190_minutes(self):
        assert time_to_full(CarState(battery_pct=40)) == 190

    def test_full_battery_needs_zero_minutes(self):
        assert time_to_full(CarState(battery_pct=100)) == 0

    def test_seventy_percent_needs_95_minutes(self):
        assert time_to_full(CarState(battery_pct=70)) == 95

    def test_charge_to_full_with_one_tick(self):
        fabric = small_fabric()
        device = register(
            fabric, "car-1", "car", "Tesla", "garage", CarState(battery_pct=40, charging=True)
        )
        fabric.tick(11400)  # 190 minutes
        assert device.state.battery_pct == 100.0

    def test_time_to_full_monotone_while_charging(self):
        fabric = small_fabric()
        device = register(
            fabric, "car-1", "car", "Tesla", "garage", CarState(battery_pct=3, charging=True)
        )
        rng = random.Random(7)
        previous = time_to_full(device.state)
        for _ in range(60):
            fabric.tick(rng.randint(1, 1200))
            current = time_to_full(device.state)
            assert current <= previous
            previous = current
        assert (device.state.battery_pct == 100.0) == (previous == 0)

    def test_battery_bounds_under_random_ticks(self):
        fabric = small_fabric()
        device = register(
            fabric, "car-1", "car", "Tesla", "garage",
            CarState(battery_pct=97, charging=True, minutes_per_percent=Fraction(1, 2)),
        )
        rng = random.Random(11)
        for _ in range(300):
            if rng.random() < 0.15:
                device.state.charging = not device.state.charging
            fabric.tick(rng.randint(1, 3600))
            assert 0.0 <= device.state.battery_pct <= 100.0

    def test_minutes_per_percent_parsed_from_config_string(self):
        state = state_for_kind("car", {"battery_pct": 40, "minutes_per_percent": "19/6"})
        assert state.minutes_per_percent == Fraction(19, 6)


class TestComfortPolicy:
    def test_seventeen_outside_means_21_4_inside(self):
        assert comfort_setpoint(17.0) == 21.4

    def test_clamped_low(self):
        assert comfort_setpoint(-10.0) == 18.0

    def test_clamped_high(self):
        assert comfort_setpoint(40.0) == 26.0

    def test_monotone_and_bounded(self):
        previous = None
        for tenth in range(-400, 501, 5):
            value = comfort_setpoint(tenth / 10.0)
            assert 18.0 <= value <= 26.0
            if previous is not None:
                assert value >= previous
            previous = value


class TestTick:
    def test_thermostat_drifts_half_degree_per_minute(self):
        fabric = small_fabric()
        device = register(
            fabric, "t-1", "thermo", "T", "lr", ThermostatState(current_temp=17.0, setpoint=21.4)
        )
        fabric.tick(60)
        assert device.state.current_temp == 17.5

    def test_thermostat_never_overshoots(self):
        fabric = small_fabric()
        device = register(
            fabric, "t-1", "thermo", "T", "lr", ThermostatState(current_temp=21.0, setpoint=21.4)
        )
        fabric.tick(3600)
        assert device.state.current_temp == 21.4

    def test_online_device_refreshes_last_seen(self):
        fabric = small_fabric()
        device = register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        fabric.tick(30)
        assert device.last_seen == 30.0

    def test_offline_device_keeps_last_heartbeat(self):
        fabric = small_fabric()
        device = register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        fabric.tick(100)
        fabric.add_offline_window("l-1", 100.0, 600.0)
        fabric.tick(100)
        assert device.last_seen == 100.0
        assert not device.online

    def test_heartbeat_lands_exactly_on_outage_start_even_with_coarse_ticks(self):
        fabric = small_fabric()
        device = register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        fabric.add_offline_window("l-1", 250.0, 600.0)
        fabric.tick(400)  # one coarse tick across the boundary
        assert device.last_seen == 250.0

    def test_tick_requires_positive_dt(self):
        fabric = small_fabric()
        with pytest.raises(ValueError):
            fabric.tick(0)

    def test_last_seen_never_exceeds_clock(self):
        fabric = small_fabric()
        device = register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        rng = random.Random(3)
        fabric.add_offline_window("l-1", 500.0, 900.0)
        for _ in range(50):
            fabric.tick(rng.randint(1, 300))
            assert device.last_seen <= fabric.now


class TestRepair:
    def test_repair_forces_device_online(self):
        fabric = small_fabric()
        device = register(fabric, "l-1", "bulb", "Lamp", "gb", LightState())
        fabric.add_offline_window("l-1", 0.0, 10_000.0)
        fabric.tick(100)
        assert not device.online
        fabric.remote_repair("l-1")
        assert device.online
        assert device.last_seen == fabric.now
        fabric.invoke("l-1", "smartHome.lightsOn", {}, "owner")  # no longer gated
