"""Server entry point: `trustnet-server --port 8400 --db-path trustnet.db`."""

from __future__ import annotations

import logging

import click
import uvicorn

from trustnet.api.app import AppConfig, create_app
from trustnet.redirects.cache import DEFAULT_MAPPING_TTL
from trustnet.redirects.resolver import DEFAULT_MAX_DEPTH
from trustnet.store import Store
from trustnet.urlcanon import default_policy_table, load_policy_table


@click.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8400, show_default=True, type=int)
@click.option("--db-path", default="trustnet.db", show_default=True)
@click.option("--policy-file", default=None, help="Param/alias config merged over built-ins.")
@click.option("--max-depth", default=DEFAULT_MAX_DEPTH, show_default=True, type=int)
@click.option(
    "--mapping-ttl",
    default=DEFAULT_MAPPING_TTL,
    show_default=True,
    type=float,
    help="Seconds a redirect mapping survives without being requested.",
)
def main(host, port, db_path, policy_file, max_depth, mapping_ttl):
    """Run the trustnet HTTP service."""
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    table = load_policy_table(policy_file) if policy_file else default_policy_table()
    store = Store.open(db_path)
    app = create_app(
        store,
        AppConfig(max_depth=max_depth, mapping_ttl=mapping_ttl, policy_table=table),
    )
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        store.close()


if __name__ == "__main__":
    main()
