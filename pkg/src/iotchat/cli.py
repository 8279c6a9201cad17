"""Command line entry points: serve, replay, seed, and engine inspection."""

import json
import sys
from pathlib import Path

import click

from iotchat.config import ConfigError, load_config
from iotchat.gateway.transcript import TranscriptError, replay_file
from iotchat.nlu import Utterance, normalize
from iotchat.system import build_system, default_config_path, transcript_path


def _config_option(func):
    return click.option(
        "--config",
        "config_path",
        type=click.Path(path_type=Path),
        default=None,
        help="Configuration document (defaults to the shipped one).",
    )(func)


def _load(config_path: Path | None):
    path = config_path or default_config_path()
    try:
        return load_config(path)
    except FileNotFoundError:
        raise click.ClickException(f"config not found: {path}")
    except ConfigError as exc:
        raise click.ClickException(str(exc))


@click.group()
def main():
    """Chat with a simulated smart-device fleet."""


@main.command()
@_config_option
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--stats-out", type=click.Path(path_type=Path), default=None,
              help="Write query-frequency stats to this JSON file on shutdown.")
def serve(config_path, port, host, stats_out):
    """Run the HTTP gateway."""
    import uvicorn

    from iotchat.http_api import build_app

    system = build_system(_load(config_path))
    app = build_app(system)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        if stats_out is not None:
            system.monitor.snapshot_stats(stats_out)


@main.command()
@_config_option
@click.argument("transcript")
def replay(config_path, transcript):
    """Replay a transcript against a freshly seeded system.

    TRANSCRIPT is a path, or the bare name of a shipped transcript
    (usecase_a .. usecase_e). Exits 0 only if every expected line matches
    byte-for-byte.
    """
    path = Path(transcript)
    if not path.exists():
        shipped = transcript_path(transcript)
        if shipped.exists():
            path = shipped
        else:
            raise click.ClickException(f"transcript not found: {transcript}")
    system = build_system(_load(config_path))
    try:
        result = replay_file(system, path)
    except TranscriptError as exc:
        raise click.ClickException(str(exc))
    if result.ok:
        click.echo(f"ok: {path.name} ({len(result.bot_lines)} bot lines matched)")
        return
    for problem in result.problems:
        click.echo(problem, err=True)
    sys.exit(1)


@main.command()
@_config_option
def seed(config_path):
    """Validate a configuration document and summarize what it seeds."""
    config = _load(config_path)
    system = build_system(config)
    devices = system.fabric.devices_in_order()
    click.echo(f"config ok: {len(config.lexicon)} lexicon entries, "
               f"{len(config.intents)} intents, {len(devices)} devices")
    for device in devices:
        cls = system.fabric.cls_of(device)
        click.echo(f"  {device.serial_id}: {device.friendly_name} "
                   f"({cls.kind} @ {device.location})")


@main.group()
def nlu():
    """Inspect the understanding engine."""


@nlu.command()
@_config_option
@click.argument("text")
def entities(config_path, text):
    """Print entity decodings for TEXT as JSON."""
    system = build_system(_load(config_path))
    matches = system.gateway.engine.decode_entities(text)
    click.echo(json.dumps([m.attributes for m in matches]))


@nlu.command()
@_config_option
@click.option("--principal", default=None, help="Principal whose devices are visible.")
@click.argument("text")
def parse(config_path, principal, text):
    """Print the full parse of TEXT (tokens, entities, intent, result)."""
    config = _load(config_path)
    system = build_system(config)
    gateway = system.gateway
    who = principal or config.default_principal
    analysis = gateway.engine.parse(
        Utterance("cli", text, 0), gateway.engine.new_contexts(), gateway._device_view(who)
    )
    out = {
        "tokens": normalize(text),
        "entities": [m.attributes for m in analysis.entities],
        "intent": analysis.intent_name,
        "score": analysis.score,
        "result_kind": type(analysis.result).__name__,
    }
    click.echo(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
