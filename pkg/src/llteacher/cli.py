"""Operational command line: serve, seed-demo, export-transcripts."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from llteacher.api import create_app
from llteacher.export import export_transcripts
from llteacher.gateway import (
    API_KEY_ENV,
    BASE_URL_ENV,
    HttpProvider,
    MockProvider,
    ProviderSettings,
    ScriptedReply,
)
from llteacher.seed import DEMO_ACCOUNTS, seed_demo
from llteacher.service import TutorService
from llteacher.store import open_store

DB_ENV = "LLTEACHER_DB"
DEFAULT_DB = "llteacher.db"

# Generic coaching lines for running the service without a real provider.
DEMO_REPLIES = [
    "Good start. Which concept from class do you think applies here, and why?",
    "Walk me through your reasoning step by step; where does the first step "
    "come from?",
    "Interesting. Can you think of a small example where that idea would "
    "break down?",
    "You're close. What would you need to check before you could be "
    "confident in that answer?",
]


def _load_provider(config_path: str | None):
    """Build (settings, provider) from the optional JSON config file.

    The live provider requires LLTEACHER_BASE_URL and LLTEACHER_API_KEY (or
    config-file equivalents); a missing value aborts startup naming the
    variable.
    """
    options: dict = {}
    if config_path:
        options = json.loads(Path(config_path).read_text(encoding="utf-8"))
    kind = options.get("provider", "http")
    tuning = {
        key: options[key]
        for key in ("request_timeout", "max_retries", "backoff_base")
        if key in options
    }
    if kind == "mock":
        settings = ProviderSettings(
            base_url="mock://local", api_key="unused", **tuning
        )
        return settings, MockProvider(
            script=[ScriptedReply(text) for text in DEMO_REPLIES], cycle=True
        )
    base_url = options.get("base_url") or os.environ.get(BASE_URL_ENV)
    api_key = options.get("api_key") or os.environ.get(API_KEY_ENV)
    if not base_url:
        sys.exit(f"error: {BASE_URL_ENV} is not set (and config has no base_url)")
    if not api_key:
        sys.exit(f"error: {API_KEY_ENV} is not set (and config has no api_key)")
    settings = ProviderSettings(base_url=base_url, api_key=api_key, **tuning)
    return settings, HttpProvider(settings)


def _db_path(args) -> str:
    return args.db or os.environ.get(DB_ENV, DEFAULT_DB)


def cmd_serve(args) -> None:
    import uvicorn

    settings, provider = _load_provider(args.config)
    store = open_store(_db_path(args))
    service = TutorService(store, settings, provider)
    app = create_app(service)
    host, _, port = args.listen.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


def cmd_seed_demo(args) -> None:
    store = open_store(_db_path(args))
    users = seed_demo(store)
    print(f"seeded {len(users)} users and the demo assignments:")
    for account in DEMO_ACCOUNTS:
        print(f"  {account.role.value:<10} name={account.name!r} "
              f"credential={account.credential!r}")
    store.close()


def cmd_export_transcripts(args) -> None:
    store = open_store(_db_path(args))
    written = export_transcripts(store, args.homework, args.out)
    for path in written:
        print(path)
    print(f"exported {len(written)} transcript(s) to {args.out}")
    store.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="llteacher")
    parser.add_argument(
        "--db", default=None, help=f"database file (default ${DB_ENV} or {DEFAULT_DB})"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--listen", default="127.0.0.1:8000", help="addr:port")
    serve.add_argument("--config", default=None, help="JSON provider config file")
    serve.set_defaults(func=cmd_serve)

    seed = sub.add_parser("seed-demo", help="load demo users and assignments")
    seed.set_defaults(func=cmd_seed_demo)

    export = sub.add_parser(
        "export-transcripts", help="write all transcripts of one homework"
    )
    export.add_argument("--homework", required=True, help="homework id")
    export.add_argument("--out", required=True, help="output directory")
    export.set_defaults(func=cmd_export_transcripts)
    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
