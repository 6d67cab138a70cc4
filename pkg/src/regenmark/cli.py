"""Command-line client for the pipeline service.

Every experiment subcommand marshals the config into an HTTP request
against the service: an in-process application instance by default (no
server needed; artifacts land on the local filesystem), or a remote
``--server`` URL.  ``bridge-check`` talks to its endpoint directly and
``serve`` starts the HTTP service.

Exit codes: 0 success, 1 config error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys

import httpx

from ._version import __version__
from .config import load_config
from .errors import ConfigInvalid, RegenmarkError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=600.0)
    # No server given: drive an in-process application instance over a
    # blocking ASGI portal, so the CLI works standalone.
    from starlette.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _load_config_data(args: argparse.Namespace) -> dict:
    config = load_config(args.config)
    data = config.model_dump()
    if args.output is not None:
        data["output_dir"] = args.output
    if args.seed is not None:
        data["master_seed"] = args.seed
    return data


def _run_experiment(command: str, args: argparse.Namespace) -> int:
    data = _load_config_data(args)
    with _client(args.server) as client:
        response = client.post(
            f"/experiments/{command}",
            json={"config": data, "jobs": args.jobs},
        )
    if response.status_code in (400, 422):
        print(f"error: {_detail(response)}", file=sys.stderr)
        return EXIT_CONFIG
    if response.status_code != 200:
        print(f"error: HTTP {response.status_code}: {_detail(response)}", file=sys.stderr)
        return EXIT_RUNTIME
    manifest = response.json()["manifest"]
    print(
        f"{command}: wrote {len(manifest['artifacts'])} artifacts under "
        f"{manifest['output_dir']} (config {manifest['config_sha256'][:12]})"
    )
    return EXIT_OK


def _detail(response: httpx.Response) -> str:
    try:
        body = response.json()
    except json.JSONDecodeError:
        return response.text[:500]
    detail = body.get("detail")
    if isinstance(detail, list):  # pydantic validation errors
        return "; ".join(
            f"{'.'.join(str(p) for p in err.get('loc', []))}: {err.get('msg')}" for err in detail
        )
    return str(detail)


def _cmd_bridge_check(args: argparse.Namespace) -> int:
    from .conformance import run_conformance_command

    command = shlex.split(args.backend_cmd) if args.backend_cmd else None
    try:
        results = run_conformance_command(command, args.tcp, args.timeout)
    except RegenmarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        suffix = f" ({result.detail})" if result.detail else ""
        print(f"[{status}] {result.name}{suffix}")
        failed += 0 if result.passed else 1
    print(f"bridge-check: {len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_RUNTIME


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("regenmark.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regenmark", description=__doc__)
    parser.add_argument("--version", action="version", version=f"regenmark {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment_parser(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config JSON file")
        p.add_argument("--output", help="override the config's output_dir")
        p.add_argument("--seed", type=int, help="override the config's master_seed")
        p.add_argument("--jobs", type=int, default=1, help="worker parallelism bound")
        p.add_argument("--server", help="remote service URL (default: run in-process)")
        return p

    experiment_parser("generate", "produce initial samples and iterative re-generation traces")
    experiment_parser("verify", "evaluate the authorship ratio test over all model pairs")
    experiment_parser("analyze", "emit convergence, density, and contraction-ratio reports")
    experiment_parser("attack", "run the robustness battery against stored traces")

    check = sub.add_parser("bridge-check", help="run the endpoint conformance suite")
    group = check.add_mutually_exclusive_group(required=True)
    group.add_argument("--backend-cmd", help="endpoint command line to spawn")
    group.add_argument("--tcp", help="endpoint address host:port")
    check.add_argument("--timeout", type=float, default=10.0)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bridge-check":
            return _cmd_bridge_check(args)
        if args.command == "serve":
            return _cmd_serve(args)
        return _run_experiment(args.command, args)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RegenmarkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
