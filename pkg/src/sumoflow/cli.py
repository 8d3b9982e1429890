"""Command-line entry points: chat REPL, batch scenario runner, gateway server,
and the stdio tool server.

The REPL is a thin client: it drives the same HTTP routes the web UI uses,
either against an embedded in-process gateway (default) or a remote one
(--server). Batch scenario execution bypasses the planner entirely.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import yaml

from .errors import ConfigError, ScenarioParseError, SumoflowError
from .gateway.app import GatewayConfig, create_app
from .planner.llm import HttpBackend, MockScriptBackend

DEFAULT_WORKSPACE = Path("./sessions")


def load_config(path: Path | None, mock_script: Path | None, workspace: Path | None) -> dict:
    """Merge the config file with CLI overrides; validate field by field."""
    config: dict = {}
    if path is not None:
        try:
            config = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except OSError as exc:
            raise ConfigError("config", f"cannot read: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"not valid YAML: {exc}") from None
    if not isinstance(config, dict):
        raise ConfigError("config", "top level must be a mapping")

    backend = config.get("backend") or {}
    if not isinstance(backend, dict):
        raise ConfigError("backend", "must be a mapping")
    if mock_script is not None:
        backend = {"kind": "mock", "script": str(mock_script)}
    kind = backend.get("kind", "mock")
    if kind not in ("mock", "http"):
        raise ConfigError("backend.kind", f"unknown backend kind {kind!r}")
    if kind == "mock" and not backend.get("script"):
        raise ConfigError("backend.script", "mock backend requires a script path")
    if kind == "http" and not backend.get("url"):
        raise ConfigError("backend.url", "http backend requires a provider url")
    backend["kind"] = kind

    ws = workspace or config.get("workspace") or DEFAULT_WORKSPACE
    osm_fixture = config.get("osm_fixture")
    dry_run = bool(config.get("dry_run_tools", False))
    ui_dir = config.get("ui_dir")
    history_cap = int(config.get("history_cap", 50))
    state_context_cap = int(config.get("state_context_cap", 10))
    if history_cap < 1:
        raise ConfigError("history_cap", "must be >= 1")
    if state_context_cap < 1:
        raise ConfigError("state_context_cap", "must be >= 1")
    templates_dir = config.get("templates_dir")
    return {
        "backend": backend,
        "workspace": Path(ws),
        "osm_fixture": Path(osm_fixture) if osm_fixture else None,
        "dry_run_tools": dry_run,
        "read_only_roots": [Path(p) for p in config.get("read_only_roots", [])],
        "ui_dir": Path(ui_dir) if ui_dir else None,
        "history_cap": history_cap,
        "state_context_cap": state_context_cap,
        "templates_dir": Path(templates_dir) if templates_dir else None,
    }


def backend_factory(backend_config: dict):
    kind = backend_config["kind"]
    if kind == "mock":
        script_path = Path(backend_config["script"])
        if not script_path.exists():
            raise ConfigError("backend.script", f"script {script_path} does not exist")
        return lambda: MockScriptBackend.from_file(script_path)
    api_key = os.environ.get(backend_config.get("api_key_env", "LLM_API_KEY"), "")
    return lambda: HttpBackend(
        url=backend_config["url"],
        api_key=api_key,
        attempts=int(backend_config.get("attempts", 3)),
        backoff_s=float(backend_config.get("backoff_s", 0.5)),
    )


def build_gateway_config(config: dict) -> GatewayConfig:
    return GatewayConfig(
        workspace_root=config["workspace"],
        backend_factory=backend_factory(config["backend"]),
        dry_run_tools=config["dry_run_tools"],
        osm_fixture=config["osm_fixture"],
        read_only_roots=config["read_only_roots"],
        ui_dir=config.get("ui_dir"),
        history_cap=config["history_cap"],
        state_context_cap=config["state_context_cap"],
        templates_dir=config.get("templates_dir"),
    )


@click.group()
def main() -> None:
    """Agentic traffic-simulation orchestration."""


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--mock-script", type=click.Path(path_type=Path), default=None)
@click.option("--workspace", type=click.Path(path_type=Path), default=None)
@click.option("--server", default=None, help="Remote gateway URL; embedded gateway when omitted.")
@click.option("--session", "session_id", default=None, help="Resume an existing session id.")
def chat(config_path, mock_script, workspace, server, session_id) -> None:
    """Interactive planning REPL (thin client over the gateway routes)."""
    try:
        config = load_config(config_path, mock_script, workspace)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    client = _make_client(server, config)
    response = client.post("/sessions", json={"session_id": session_id})
    if response.status_code == 409 and session_id:
        click.echo(f"(resuming is automatic: session {session_id} already open on the server)")
    response.raise_for_status() if response.status_code != 409 else None
    sid = response.json().get("session_id", session_id)
    click.echo(f"session {sid} ready. Type a request; Ctrl-D to leave.")

    while True:
        try:
            line = input("you> ").strip()
        except EOFError:
            click.echo("\nsession persisted; bye.")
            return
        if not line:
            continue
        posted = client.post(f"/sessions/{sid}/messages", json={"text": line})
        if posted.status_code != 200:
            click.echo(f"error: {posted.json().get('detail')}", err=True)
            continue
        pending_plan = _print_events(posted.json()["events"])
        while pending_plan:
            try:
                decision = input("plan [y/n/modify]> ").strip().lower()
            except EOFError:
                click.echo("\nsession persisted; plan still pending on resume.")
                return
            if decision in ("y", "yes", "approve"):
                payload = {"decision": "approve"}
            elif decision in ("n", "no", "reject"):
                payload = {"decision": "reject"}
            elif decision.startswith("modify"):
                _, _, rest = decision.partition(":")
                edits = {}
                if rest.strip():
                    try:
                        edits = json.loads(rest)
                    except json.JSONDecodeError:
                        click.echo("modify edits must be JSON, e.g. modify: {\"radius_m\": 1000}")
                        continue
                payload = {"decision": "modify", "edits": edits}
            else:
                click.echo("please answer y, n, or modify: {...}")
                continue
            decided = client.post(f"/sessions/{sid}/plan-decision", json=payload)
            if decided.status_code != 200:
                click.echo(f"error: {decided.json().get('detail')}", err=True)
                break
            pending_plan = _print_events(decided.json()["events"])


def _print_events(events: list[dict]) -> bool:
    """Render events; True when a plan awaits a y/n/modify decision."""
    pending = False
    for event in events:
        kind = event["kind"]
        payload = event["payload"]
        if kind == "agent_text":
            click.echo(f"agent> {payload['text']}")
        elif kind == "clarification":
            for question in payload["questions"]:
                click.echo(f"agent? {question['question']} [default: {question['default']}]")
        elif kind == "plan_preview":
            plan = payload["plan"]
            click.echo(f"plan ({plan['status']}):")
            for index, step in enumerate(plan["steps"], 1):
                click.echo(f"  {index}. {step['tool']} {json.dumps(step['args'])}")
            if plan["status"] == "awaiting_confirmation":
                pending = True
        elif kind == "tool_started":
            click.echo(f"tool> {payload['tool']} ...")
        elif kind == "tool_finished":
            status = "failed" if payload["is_error"] else "ok"
            click.echo(f"tool> {payload['tool']} {status}")
        elif kind == "metrics_ready":
            click.echo(f"metrics> {json.dumps(payload['value'])[:200]}")
        elif kind == "error":
            click.echo(f"warn> {payload['message']}")
    return pending


def _make_client(server: str | None, config: dict):
    import httpx

    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    app = create_app(build_gateway_config(config))
    return TestClient(app)


@main.command("run-scenario")
@click.argument("scenario_path", type=click.Path(path_type=Path, exists=False))
@click.option("--workspace", type=click.Path(path_type=Path), default=None)
@click.option("--session", "session_id", default="batch")
@click.option("--osm-fixture", type=click.Path(path_type=Path), default=None)
def run_scenario_command(scenario_path, workspace, session_id, osm_fixture) -> None:
    """Execute a declarative scenario file without any language model."""
    from .analysis.store import ResultStore
    from .scenario.geocode import Geocoder
    from .scenario_file import load_scenario, run_scenario
    from .toolserver.runner import SubprocessRunner
    from .toolserver.workspace import WorkspaceManager
    from .tools_catalog import ToolContext, build_registry

    try:
        scenario = load_scenario(scenario_path)
    except ScenarioParseError as exc:
        click.echo(f"scenario error: {exc}", err=True)
        sys.exit(2)

    root = Path(workspace) if workspace else DEFAULT_WORKSPACE
    manager = WorkspaceManager(root)
    session_id = scenario.get("session") or session_id
    ws = manager.open(session_id)
    fixture = Path(osm_fixture) if osm_fixture else None
    if fixture is None and scenario.get("network", {}).get("osm_fixture"):
        fixture = Path(scenario["network"]["osm_fixture"])
    read_only = [fixture.parent] if fixture else []
    ctx = ToolContext(
        workspace=ws,
        runner=SubprocessRunner(read_only_roots=read_only),
        store=ResultStore(root / "results.sqlite"),
        geocoder=Geocoder(),
        osm_fixture=fixture,
        session_id=session_id,
    )
    registry = build_registry(ctx)
    try:
        document = run_scenario(scenario, registry, ws.root)
    except SumoflowError as exc:
        click.echo(f"pipeline error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"metrics written to {document['metrics_path']}")


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--mock-script", type=click.Path(path_type=Path), default=None)
@click.option("--workspace", type=click.Path(path_type=Path), default=None)
@click.option("--port", type=int, default=8008)
@click.option("--host", default="127.0.0.1")
def serve(config_path, mock_script, workspace, port, host) -> None:
    """Run the HTTP gateway for the web UI."""
    import uvicorn

    try:
        config = load_config(config_path, mock_script, workspace)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    app = create_app(build_gateway_config(config))
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:
        click.echo(f"bind error: {exc}", err=True)
        sys.exit(1)


@main.command("mcp-stdio")
@click.option("--workspace", type=click.Path(path_type=Path), default=None)
@click.option("--session", "session_id", default="mcp")
@click.option("--osm-fixture", type=click.Path(path_type=Path), default=None)
def mcp_stdio(workspace, session_id, osm_fixture) -> None:
    """Serve the tool catalog over newline-delimited JSON-RPC on stdio."""
    from .analysis.store import ResultStore
    from .mcp.server import McpServer
    from .mcp.stdio import serve_stdio
    from .scenario.geocode import Geocoder
    from .toolserver.runner import SubprocessRunner
    from .toolserver.workspace import WorkspaceManager
    from .tools_catalog import ToolContext, build_registry

    root = Path(workspace) if workspace else DEFAULT_WORKSPACE
    manager = WorkspaceManager(root)
    ws = manager.open(session_id)
    fixture = Path(osm_fixture) if osm_fixture else None
    ctx = ToolContext(
        workspace=ws,
        runner=SubprocessRunner(read_only_roots=[fixture.parent] if fixture else []),
        store=ResultStore(root / "results.sqlite"),
        geocoder=Geocoder(),
        osm_fixture=fixture,
        session_id=session_id,
    )
    serve_stdio(McpServer(build_registry(ctx)))


if __name__ == "__main__":
    main()
