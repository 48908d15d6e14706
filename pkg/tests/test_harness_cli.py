import json
import threading

import pytest
import uvicorn
from click.testing import CliRunner

from trustnet.api.app import AppConfig, create_app
from trustnet.harness.cli import main
from trustnet.harness.seeding import seed_service
from trustnet.harness.worldgen import gen_world
from trustnet.store import Store


@pytest.fixture
def runner():
    return CliRunner()


class TestGenWorld:
    def test_stdout_and_reproducibility(self, runner):
        a = runner.invoke(main, ["gen-world", "--seed", "7"])
        b = runner.invoke(main, ["gen-world", "--seed", "7"])
        assert a.exit_code == 0 and a.output == b.output
        doc = json.loads(a.output)
        assert doc["seed"] == 7 and doc["sources"]

    def test_write_to_file(self, runner, tmp_path):
        out = tmp_path / "world.json"
        result = runner.invoke(main, ["gen-world", "--seed", "3", "--out", str(out)])
        assert result.exit_code == 0
        assert json.loads(out.read_text())["seed"] == 3


class TestCheckOracle:
    def test_passes_quickly_on_small_run(self, runner):
        result = runner.invoke(
            main, ["check-oracle", "--random-worlds", "50", "--json"]
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        assert doc["passed"] is True and doc["cases"] > 4000


class TestSimulateRate:
    def test_human_output(self, runner):
        result = runner.invoke(
            main, ["simulate-rate", "--limit", "4", "--duration", "120"]
        )
        assert result.exit_code == 0
        assert "steady sent rate" in result.output

    def test_json_series(self, runner):
        result = runner.invoke(
            main, ["simulate-rate", "--limit", "2", "--duration", "30", "--json"]
        )
        doc = json.loads(result.output)
        assert len(doc["perSecond"]) == 30
        assert 0 <= doc["limitedFraction"] <= 1


class TestRunCorpus:
    def test_shipped_corpus_passes(self, runner):
        result = runner.invoke(main, ["run-corpus"])
        assert result.exit_code == 0, result.output
        assert "40/40 passed" in result.output

    def test_wrong_expectation_fails_with_line(self, runner, tmp_path):
        corpus = tmp_path / "bad.tsv"
        corpus.write_text(
            "https://example.com/a\thttps://example.com/a\n"
            "https://example.com/b\thttps://example.com/WRONG\n"
        )
        result = runner.invoke(main, ["run-corpus", str(corpus)])
        assert result.exit_code == 1
        assert "1/2 passed" in result.output and "line 2" in result.output

    def test_empty_corpus_warns_but_passes(self, runner, tmp_path):
        corpus = tmp_path / "empty.tsv"
        corpus.write_text("# nothing here\n")
        result = runner.invoke(main, ["run-corpus", str(corpus)])
        assert result.exit_code == 0
        assert "warning: corpus is empty" in result.output

    def test_unreadable_corpus(self, runner, tmp_path):
        result = runner.invoke(main, ["run-corpus", str(tmp_path / "missing.tsv")])
        assert result.exit_code == 2


class TestExportImport:
    def test_round_trip_via_cli(self, runner, tmp_path):
        db1 = tmp_path / "one.db"
        store = Store.open(db1)
        from trustnet.model import Verdict

        alice = store.add_source("alice", "Alice")
        store.upsert_assessment(alice.id, "https://a.ex/1", Verdict.ACCURATE)
        store.close()

        dump = tmp_path / "dump.ndjson"
        result = runner.invoke(
            main, ["export", "--db-path", str(db1), "--out", str(dump)]
        )
        assert result.exit_code == 0
        db2 = tmp_path / "two.db"
        result = runner.invoke(
            main, ["import", "--db-path", str(db2), "--records", str(dump)]
        )
        assert result.exit_code == 0
        copied = Store.open(db2)
        assert copied.get_source_by_username("alice") is not None
        copied.close()


class TestSeedAgainstLiveServer:
    def test_seed_world_via_public_api(self, tmp_path):
        store = Store.open(tmp_path / "live.db")
        app = create_app(store, AppConfig())
        server_config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
        server = uvicorn.Server(server_config)
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        while not server.started:
            pass
        port = server.servers[0].sockets[0].getsockname()[1]
        try:
            world = gen_world(21)
            summary = seed_service(f"http://127.0.0.1:{port}", world)
            assert summary["sourcesCreated"] == len(world.sources)
            # seeding twice is fine: accounts already exist, data upserts
            again = seed_service(f"http://127.0.0.1:{port}", world)
            assert again["sourcesExisting"] == len(world.sources)
            # spot-check one viewer's derived status against the world
            assert len(store.list_sources()) == len(world.sources)
        finally:
            server.should_exit = True
            thread.join(timeout=5)
            store.close()
