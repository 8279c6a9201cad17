"""Wiring: configuration document in, running system out."""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from iotchat.config import Config, load_config
from iotchat.fabric import DeviceInstance, Environment, Fabric, state_for_kind
from iotchat.gateway.service import Gateway
from iotchat.monitor import Monitor


@dataclass
class System:
    config: Config
    fabric: Fabric
    monitor: Monitor
    gateway: Gateway


def default_config_path() -> Path:
    return Path(str(resources.files("iotchat").joinpath("data/default_config.json")))


def transcript_path(name: str) -> Path:
    """Resolve a shipped transcript by bare name (e.g. "usecase_a")."""
    if not name.endswith(".txt"):
        name += ".txt"
    return Path(str(resources.files("iotchat").joinpath(f"data/transcripts/{name}")))


def build_system(config: Config | str | Path | None = None) -> System:
    if config is None:
        config = default_config_path()
    if not isinstance(config, Config):
        config = load_config(config)

    fabric = Fabric(
        Environment(outside_temp=config.outside_temp), permissions=config.permissions
    )
    classes = {c.class_id: c for c in config.classes}
    for cls in config.classes:
        fabric.add_class(cls)
    for seed in config.device_seeds:
        cls = classes[seed.class_id]
        instance = DeviceInstance(
            serial_id=seed.serial,
            class_id=seed.class_id,
            friendly_name=seed.name,
            location=seed.location,
            state=state_for_kind(cls.kind, seed.state),
        )
        fabric.register_device(instance)
        if seed.configured is not None:
            instance.configured = seed.configured
    for serial, start, end in config.availability_script:
        fabric.add_offline_window(serial, start, end)

    monitor = Monitor(
        fabric,
        heartbeat_timeout=config.heartbeat_timeout,
        offline_threshold=config.offline_threshold,
    )
    gateway = Gateway(config, fabric, monitor)
    return System(config=config, fabric=fabric, monitor=monitor, gateway=gateway)
