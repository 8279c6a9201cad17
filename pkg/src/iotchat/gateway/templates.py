"""Deterministic reply rendering from the configured template table."""

import logging
import math

logger = logging.getLogger(__name__)


def weather_adjective(outside_temp: float) -> str:
    if outside_temp < 18.0:
        return "a cool"
    if outside_temp <= 28.0:
        return "a warm"
    return "a hot"


def format_temp(value: float) -> str:
    """Compact temperature: whole degrees without a decimal point."""
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.1f}"


def format_setpoint(value: float) -> str:
    return f"{value:.1f}"


def format_duration(minutes: int) -> str:
    minutes = int(minutes)
    return f"{minutes // 60} Hours {minutes % 60} minutes"


def format_battery(value: float) -> str:
    return str(int(math.floor(value)))


class Templates:
    """Fixed-string templates with named placeholders.

    ``render`` derives display fields from raw values (setpoints get one
    decimal, durations become "{H} Hours {M} minutes", an ``outside``
    temperature brings its weather adjective along) and interpolates. An
    unbound placeholder is an internal error: it is logged and the fallback
    template is returned instead of a broken reply.
    """

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)

    def raw(self, template_id: str) -> str | None:
        return self.table.get(template_id)

    @staticmethod
    def _display_params(params: dict) -> dict:
        out = dict(params)
        if "outside" in params:
            out["weather"] = weather_adjective(float(params["outside"]))
            out["outside"] = format_temp(float(params["outside"]))
        if "setpoint" in params:
            out["setpoint"] = format_setpoint(float(params["setpoint"]))
        if "current_temp" in params:
            out["current"] = format_temp(float(params["current_temp"]))
        if "water_temp" in params:
            out["water"] = format_temp(float(params["water_temp"]))
        if "minutes_to_full" in params:
            out["duration"] = format_duration(params["minutes_to_full"])
        if "battery_pct" in params:
            out["battery"] = format_battery(float(params["battery_pct"]))
        if "locked" in params:
            out["locked_state"] = "locked" if params["locked"] else "unlocked"
        if "names" in params and isinstance(params["names"], (list, tuple)):
            out["names"] = ", ".join(params["names"])
        return out

    def render(self, template_id: str, **params) -> str:
        template = self.table.get(template_id)
        if template is None:
            logger.warning("unknown template %r", template_id)
            return self.table.get("fallback", "Sorry, something went wrong.")
        try:
            return template.format(**self._display_params(params))
        except (KeyError, IndexError, ValueError) as exc:
            logger.warning("template %r failed to render: %r", template_id, exc)
            return self.table.get("fallback", "Sorry, something went wrong.")
