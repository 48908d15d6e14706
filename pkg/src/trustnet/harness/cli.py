"""Verification and operations CLI.

Subcommands: gen-world, check-oracle, simulate-rate, run-corpus, seed,
export, import. Reports go to stdout; --json switches the machine-readable
form. Exit code is nonzero whenever a check fails.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from trustnet.harness.corpus import run_corpus, shipped_corpus_path
from trustnet.harness.oracle import oracle_status
from trustnet.harness.seeding import seed_service
from trustnet.harness.simulate import GovernorConfig, simulate_rate
from trustnet.harness.worldgen import World, exhaustive_small_worlds, gen_world
from trustnet.model import compute_page_status
from trustnet.store import Store
from trustnet.urlcanon import default_policy_table, load_policy_table


@click.group()
def main():
    """Fixture generation, differential checks, and data seeding."""


@main.command("gen-world")
@click.option("--seed", type=int, required=True)
@click.option("--max-sources", default=8, show_default=True)
@click.option("--max-assessments", default=6, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Default: stdout.")
def gen_world_cmd(seed, max_sources, max_assessments, out):
    """Generate a seed-reproducible world snapshot."""
    world = gen_world(seed, max_sources=max_sources, max_assessments=max_assessments)
    text = world.to_json()
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote world (seed {seed}) to {out}")
    else:
        click.echo(text)


def _production_status(viewer_id: str, url_key: str, world: World) -> tuple[str, str]:
    live = [a for a in world.assessments if a.url_key == url_key]
    status = compute_page_status(viewer_id, url_key, live, world.relations_for(viewer_id))
    return status.status.value, status.basis.value


@main.command("check-oracle")
@click.option("--random-worlds", default=1000, show_default=True)
@click.option("--exhaustive/--no-exhaustive", default=True, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def check_oracle_cmd(random_worlds, exhaustive, as_json):
    """Differential check: aggregation vs the brute-force oracle."""
    cases = 0
    mismatches = []
    if exhaustive:
        for world, viewer, key in exhaustive_small_worlds():
            cases += 1
            got = _production_status(viewer, key, world)
            want = oracle_status(viewer, key, world)
            if got != want:
                mismatches.append({"kind": "exhaustive", "case": cases, "got": got, "want": want})
    for seed in range(random_worlds):
        world = gen_world(seed)
        for source in world.sources:
            for key in world.url_keys:
                cases += 1
                got = _production_status(source.id, key, world)
                want = oracle_status(source.id, key, world)
                if got != want:
                    mismatches.append(
                        {"kind": "random", "seed": seed, "viewer": source.id,
                         "urlKey": key, "got": got, "want": want}
                    )
    if as_json:
        click.echo(json.dumps(
            {"cases": cases, "mismatches": mismatches, "passed": not mismatches},
            indent=2,
        ))
    else:
        click.echo(f"checked {cases} cases: {len(mismatches)} mismatches")
        for m in mismatches[:20]:
            click.echo(f"  {m}")
    if mismatches:
        sys.exit(1)


@main.command("simulate-rate")
@click.option("--limit", type=float, required=True, help="Domain's true limit, req/s.")
@click.option("--duration", default=300.0, show_default=True)
@click.option("--warmup", default=60.0, show_default=True)
@click.option("--initial-rate", default=1.0, show_default=True)
@click.option("--floor", default=0.25, show_default=True)
@click.option("--ceiling", default=8.0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def simulate_rate_cmd(limit, duration, warmup, initial_rate, floor, ceiling, as_json):
    """Simulate AIMD adaptation against a rate-limited domain."""
    config = GovernorConfig(initial_rate=initial_rate, floor=floor, ceiling=ceiling)
    trace = simulate_rate(limit, duration, config)
    steady = trace.sent_rate(warmup, duration)
    limited = trace.limited_fraction(warmup, duration)
    if as_json:
        click.echo(json.dumps(
            {
                "limit": limit,
                "duration": duration,
                "steadyStateSentRate": steady,
                "limitedFraction": limited,
                "finalRate": trace.rate_points[-1][1],
                "perSecond": trace.per_second(),
            }
        ))
    else:
        click.echo(
            f"limit {limit} req/s over {duration:.0f}s: steady sent rate "
            f"{steady:.2f} req/s, limited {limited:.1%} after {warmup:.0f}s warm-up"
        )


@main.command("run-corpus")
@click.argument("corpus", type=click.Path(exists=False), required=False)
@click.option("--policy-file", default=None)
@click.option("--json", "as_json", is_flag=True)
def run_corpus_cmd(corpus, policy_file, as_json):
    """Check a canonicalization corpus (default: the shipped 40 cases)."""
    path = Path(corpus) if corpus else shipped_corpus_path()
    table = load_policy_table(policy_file) if policy_file else default_policy_table()
    try:
        report = run_corpus(path, table)
    except OSError as exc:
        click.echo(f"cannot read corpus: {exc}", err=True)
        sys.exit(2)
    click.echo(report.to_json() if as_json else report.describe())
    if not report.passed:
        sys.exit(1)


@main.command("seed")
@click.option("--base-url", default="http://127.0.0.1:8400", show_default=True)
@click.option("--seed", "seed_value", type=int, default=None, help="Generate the world to push.")
@click.option("--world-file", type=click.Path(exists=True), default=None)
@click.option("--json", "as_json", is_flag=True)
def seed_cmd(base_url, seed_value, world_file, as_json):
    """Push a world into a running service via the public API."""
    if (seed_value is None) == (world_file is None):
        raise click.UsageError("pass exactly one of --seed or --world-file")
    if world_file:
        world = World.from_json(Path(world_file).read_text(encoding="utf-8"))
    else:
        world = gen_world(seed_value)
    summary = seed_service(base_url, world)
    if as_json:
        click.echo(json.dumps(summary, indent=2, sort_keys=True))
    else:
        click.echo(
            f"seeded {summary['sourcesCreated']} new sources "
            f"({summary['sourcesExisting']} already present), "
            f"{summary['assessments']} assessments, {summary['questions']} questions"
        )


@main.command("export")
@click.option("--db-path", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Default: stdout.")
def export_cmd(db_path, out):
    """Dump a store as newline-delimited JSON records."""
    store = Store.open(db_path)
    try:
        lines = list(store.export_records())
    finally:
        store.close()
    text = "\n".join(lines) + ("\n" if lines else "")
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"exported {len(lines)} records to {out}")
    else:
        click.echo(text, nl=False)


@main.command("import")
@click.option("--db-path", required=True, type=click.Path())
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
def import_cmd(db_path, records_path):
    """Load records produced by export into a store."""
    store = Store.open(db_path)
    try:
        count = store.import_records(
            Path(records_path).read_text(encoding="utf-8").splitlines()
        )
    finally:
        store.close()
    click.echo(f"imported {count} records into {db_path}")


if __name__ == "__main__":
    main()
