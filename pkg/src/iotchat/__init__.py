"""Conversational gateway for controlling a simulated smart-device fleet."""

from iotchat.config import Config, ConfigError, load_config, parse_config
from iotchat.system import System, build_system, default_config_path, transcript_path

__version__ = "0.1.0"

__all__ = [
    "Config",
    "ConfigError",
    "System",
    "__version__",
    "build_system",
    "default_config_path",
    "load_config",
    "parse_config",
    "transcript_path",
]
