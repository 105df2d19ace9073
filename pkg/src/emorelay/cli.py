"""Operator CLI: run the service, exercise the pipeline offline, evaluate
classifiers on fixtures, and inspect or validate teaser catalogs.

Machine-readable JSON goes to stdout; human-readable summaries go to stderr.
Exit codes: 0 success, 2 usage error, 3 validation failure, 4 runtime error.
"""

from __future__ import annotations

import json
import socket
import sys
from dataclasses import replace
from pathlib import Path

import click

from .catalog import default_catalog_document, list_by_emotion, load_catalog, load_catalog_file
from .classify import StaticTranscriptionClient
from .config import ServiceConfig, load_config
from .emotions import EMOTIONS
from .errors import EmorelayError
from .evalharness import evaluate_fixtures, format_report_table
from .pipeline import EmotionPipeline

EXIT_VALIDATION = 3
EXIT_RUNTIME = 4


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


_CONFIG_FLAGS = [
    click.option("--host", "listen_host", default=None, help="Listen address."),
    click.option("--port", "listen_port", type=int, default=None, help="Listen port."),
    click.option("--w-speech", type=float, default=None, help="Fusion weight for the speech modality."),
    click.option("--w-text", type=float, default=None, help="Fusion weight for the text modality."),
    click.option("--model-path", type=click.Path(path_type=Path), default=None,
                 help="Acoustic weight file; omitted = heuristic fallback."),
    click.option("--lexicon-path", type=click.Path(path_type=Path), default=None),
    click.option("--taxonomy-path", type=click.Path(path_type=Path), default=None),
    click.option("--catalog-path", type=click.Path(path_type=Path), default=None),
    click.option("--transcripts-path", type=click.Path(path_type=Path), default=None,
                 help="JSON map of clip digest to transcript (mock transcription)."),
    click.option("--storage-dir", type=click.Path(path_type=Path), default=None),
    click.option("--upload-ttl-s", type=float, default=None),
    click.option("--duration-cap-s", type=float, default=None),
    click.option("--transcribe-timeout-s", type=float, default=None),
]


def _with_config_flags(command):
    for flag in reversed(_CONFIG_FLAGS):
        command = flag(command)
    return command


def _resolve_config(config_path: Path | None, flags: dict) -> ServiceConfig:
    overrides = {k: v for k, v in flags.items() if v is not None}
    return load_config(config_path, overrides=overrides)


def _build_pipeline(config: ServiceConfig) -> EmotionPipeline:
    from .service.app import _load_pipeline

    return _load_pipeline(config)


@click.group()
def main() -> None:
    """Voice-message relay with pre-retrieval emotion teasers."""


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="JSON config file; flags and EMORELAY_* env vars override it.")
@_with_config_flags
def serve(config_path: Path | None, **flags) -> None:
    """Run the relay service until interrupted."""
    import uvicorn

    from .service.app import create_app

    try:
        config = _resolve_config(config_path, flags)
        app = create_app(config)
    except EmorelayError as exc:
        _fail(str(exc), EXIT_VALIDATION)
        return

    # pre-flight bind so a port conflict fails fast with a clear error
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.listen_host, config.listen_port))
    except OSError as exc:
        _fail(f"address in use: {config.listen_host}:{config.listen_port} ({exc})", EXIT_RUNTIME)
        return
    finally:
        probe.close()

    click.echo(
        f"listening on {config.listen_host}:{config.listen_port}, "
        f"storage at {config.storage_dir}",
        err=True,
    )
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="warning")


@main.command()
@click.argument("wav_path", type=click.Path(exists=True, path_type=Path))
@click.option("--transcript", default=None, help="Use this transcript instead of a transcription client.")
@click.option("--server", "server_url", default=None,
              help="POST the file to a running service instead of classifying in-process.")
@_with_config_flags
def classify(wav_path: Path, transcript: str | None, server_url: str | None, **flags) -> None:
    """Classify one WAV file and print the analysis as JSON."""
    if server_url is not None:
        _classify_via_server(wav_path, transcript, server_url)
        return
    try:
        config = _resolve_config(None, flags)
        pipeline = _build_pipeline(config)  # honors transcripts_path for mock transcription
        if transcript is not None:
            pipeline = replace(pipeline, transcription=StaticTranscriptionClient(transcript))

        from .audio import parse_wav
        from .service.app import analysis_to_response

        clip = parse_wav(wav_path.read_bytes())
        analysis = pipeline.analyze(clip)
    except EmorelayError as exc:
        _fail(f"{exc.code}: {exc}", EXIT_VALIDATION)
        return

    response = analysis_to_response(analysis)
    click.echo(response.model_dump_json(indent=2))
    click.echo(
        f"modality={response.modality} top_two={response.top_two} "
        f"transcript={response.transcript!r}",
        err=True,
    )


def _classify_via_server(wav_path: Path, transcript: str | None, server_url: str) -> None:
    import httpx

    data = {"transcript": transcript} if transcript is not None else {}
    try:
        reply = httpx.post(
            server_url.rstrip("/") + "/classify",
            files={"file": (wav_path.name, wav_path.read_bytes(), "audio/wav")},
            data=data,
            timeout=30.0,
        )
    except httpx.HTTPError as exc:
        _fail(f"server unreachable: {exc}", EXIT_RUNTIME)
        return
    if reply.status_code != 200:
        _fail(f"server rejected the clip: {reply.text}", EXIT_VALIDATION)
        return
    click.echo(json.dumps(reply.json(), indent=2))


@main.command(name="eval")
@click.argument("fixture_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@_with_config_flags
def eval_command(fixture_dir: Path, **flags) -> None:
    """Evaluate the classifiers on a directory of wav/txt/label triples."""
    try:
        config = _resolve_config(None, flags)
        pipeline = _build_pipeline(config)
        report = evaluate_fixtures(fixture_dir, pipeline)
    except EmorelayError as exc:
        _fail(f"{exc.code}: {exc}", EXIT_VALIDATION)
        return
    click.echo(report.to_json())
    click.echo(format_report_table(report), err=True)


@main.group()
def catalog() -> None:
    """Inspect or validate teaser catalogs."""


def _load_catalog_for_cli(path: Path | None):
    if path is None:
        return load_catalog(default_catalog_document())
    return load_catalog_file(path)


@catalog.command(name="validate")
@click.argument("path", type=click.Path(exists=True, path_type=Path), required=False)
def catalog_validate(path: Path | None) -> None:
    """Validate a catalog document (the bundled one when PATH is omitted)."""
    try:
        loaded = _load_catalog_for_cli(path)
    except EmorelayError as exc:
        _fail(f"{exc.code}: {exc}", EXIT_VALIDATION)
        return
    animated = sum(1 for s in loaded.entries.values() if s.mode == "animated")
    click.echo(
        json.dumps(
            {
                "entries": len(loaded),
                "animated": animated,
                "color": len(loaded) - animated,
                "version": loaded.version,
            }
        )
    )
    click.echo(f"{len(loaded)} entries, catalog version {loaded.version}", err=True)


@catalog.command(name="list")
@click.argument("path", type=click.Path(exists=True, path_type=Path), required=False)
def catalog_list(path: Path | None) -> None:
    """List all teaser IDs grouped by emotion and mode."""
    try:
        loaded = _load_catalog_for_cli(path)
    except EmorelayError as exc:
        _fail(f"{exc.code}: {exc}", EXIT_VALIDATION)
        return
    grouped = {
        mode: {
            emotion: [s.id for s in list_by_emotion(loaded, emotion, mode)]
            for emotion in EMOTIONS
        }
        for mode in ("animated", "color")
    }
    click.echo(json.dumps(grouped, indent=2))
    for mode, by_emotion in grouped.items():
        click.echo(f"[{mode}]", err=True)
        for emotion, ids in by_emotion.items():
            click.echo(f"  {emotion:<10} {' '.join(i.split('/')[-1] for i in ids)}", err=True)


if __name__ == "__main__":
    main()
