"""Command-line client for the simulation service.

Each subcommand posts to the service API and writes the returned CSV/JSON
artifacts. By default an in-process app handles the request (no server
needed); pass --server to talk to a running instance instead.

Exit codes: 0 success, 1 usage/config error, 2 domain failure (collision).
"""

from __future__ import annotations

import json
import sys
import warnings
from pathlib import Path

import click
import httpx

from .service.app import create_app

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    return TestClient(create_app())


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_CONFIG)


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        _fail(f"config file not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        _fail(f"{p}: invalid JSON at line {exc.lineno}: {exc.msg}")


def _resolve_world(config: dict, base_dir: Path, override: str | None):
    """World references resolve against the config file, not the cwd."""
    if override is not None:
        config["world"] = override
    world = config.get("world")
    if isinstance(world, str) and not world.startswith("fixture:"):
        p = Path(world)
        if not p.is_absolute():
            config["world"] = str((base_dir / p).resolve())


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    reply = client.post(path, json=payload)
    if reply.status_code in (400, 422):
        detail = reply.json().get("detail", reply.text)
        if isinstance(detail, list):  # pydantic validation errors
            parts = []
            for err in detail:
                loc = ".".join(str(x) for x in err.get("loc", []) if x != "body")
                parts.append(f"{loc}: {err.get('msg')}")
            detail = "; ".join(parts)
        _fail(str(detail))
    reply.raise_for_status()
    return reply.json()


def _write(out_dir: str, name: str, text: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _dump_json(data) -> str:
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


@click.group()
def main():
    """Time-to-transit navigation: simulate, analyze, sweep."""


@main.command()
@click.option("--config", "config_path", required=True, type=str,
              help="Episode config JSON (mirrors the EpisodeConfig fields).")
@click.option("--out", "out_dir", default=".", show_default=True)
@click.option("--seed", type=int, default=None, help="Override the episode seed.")
@click.option("--world", default=None, help="Override the world file.")
@click.option("--server", default=None, help="Service URL (default: in-process).")
def simulate(config_path, out_dir, seed, world, server):
    """Run one closed-loop episode; writes episode.csv + episode.json."""
    config = _load_json(config_path)
    _resolve_world(config, Path(config_path).resolve().parent, world)
    if seed is not None:
        if seed < 0:
            _fail("seed must be non-negative")
        config["seed"] = seed
    with _client(server) as client:
        body = _post(client, "/simulate", {"config": config})
    _write(out_dir, "episode.csv", body["csv"])
    _write(out_dir, "episode.json",
           _dump_json({"events": body["events"], "metrics": body["metrics"]}))
    if body["collision"]:
        click.echo("collision: episode truncated", err=True)
        sys.exit(EXIT_DOMAIN)
    click.echo(f"episode complete: {body['metrics'].get('duration'):.2f} s simulated")


@main.command()
@click.option("--config", "config_path", required=True, type=str,
              help="Grid manifest JSON with single_wall and/or tau_balance lists.")
@click.option("--out", "out_dir", default=".", show_default=True)
@click.option("--server", default=None)
def stability(config_path, out_dir, server):
    """Evaluate linearization grids; writes stability.csv."""
    manifest = _load_json(config_path)
    payload = {"single_wall": manifest.get("single_wall"),
               "tau_balance": manifest.get("tau_balance")}
    with _client(server) as client:
        body = _post(client, "/stability", payload)
    path = _write(out_dir, "stability.csv", body["csv"])
    click.echo(f"{len(body['rows'])} grid points -> {path}")


@main.command("tau-trace")
@click.option("--config", "config_path", default=None, type=str,
              help="TauTraceConfig JSON; defaults used when omitted.")
@click.option("--out", "out_dir", default=".", show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--server", default=None)
def tau_trace(config_path, out_dir, seed, server):
    """Geometric-vs-perceived tau maneuvers; writes tau_trace.csv + summary."""
    config = _load_json(config_path) if config_path else {}
    if config_path:
        _resolve_world(config, Path(config_path).resolve().parent, None)
    if seed is not None:
        config["seed"] = seed
    with _client(server) as client:
        body = _post(client, "/tau-trace", {"config": config})
    _write(out_dir, "tau_trace.csv", body["csv"])
    _write(out_dir, "tau_trace_summary.json", _dump_json(body["summary"]))
    ratios = body["summary"].get("rms_ratio", {})
    shown = ", ".join(f"{k}={v:.3f}" for k, v in ratios.items())
    click.echo(f"rms ratios (sense-act / continuous): {shown}")


@main.command()
@click.option("--config", "config_path", required=True, type=str,
              help="Sweep manifest: {config, grid, seeds | seed_base+n_seeds}.")
@click.option("--out", "out_dir", default=".", show_default=True)
@click.option("--server", default=None)
def sweep(config_path, out_dir, server):
    """Gain-grid x seed batch of episodes; writes sweep.csv."""
    manifest = _load_json(config_path)
    episode = manifest.get("config")
    if not isinstance(episode, dict):
        _fail("sweep manifest needs a 'config' object")
    _resolve_world(episode, Path(config_path).resolve().parent, None)
    payload = {"config": episode, "grid": manifest.get("grid") or {},
               "seeds": manifest.get("seeds") or [],
               "seed_base": manifest.get("seed_base"),
               "n_seeds": manifest.get("n_seeds")}
    with _client(server) as client:
        body = _post(client, "/sweep", payload)
    path = _write(out_dir, "sweep.csv", body["csv"])
    click.echo(f"{body['n_ok']}/{len(body['rows'])} episodes ok -> {path}")
    if body["n_ok"] == 0:
        sys.exit(EXIT_CONFIG)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service (uvicorn)."""
    import uvicorn

    uvicorn.run("taunav.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
