"""Acceptance gate: every criterion below runs at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail line
per criterion.
"""

import json
import random
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from trustnet.api.app import AppConfig, create_app
from trustnet.harness.corpus import run_corpus, shipped_corpus_path
from trustnet.harness.oracle import oracle_status
from trustnet.harness.simulate import simulate_rate
from trustnet.harness.worldgen import exhaustive_small_worlds, gen_world
from trustnet.model import (
    compute_page_status,
    recommend_sources,
    relation_tag,
    visible_assessments,
    visible_questions,
)
from trustnet.redirects.cache import InMemoryMappingCache
from trustnet.redirects.resolver import DepthExceeded, FetchFailed, HttpFetcher, LoopDetected, resolve
from trustnet.store import Store
from trustnet.urlcanon import canonicalize, default_policy_table

from mockserver import MockServer, Route, html_page, redirect_to
from test_resolver import HostMappingFetcher
from urlfuzz import fuzz_url

FIXTURES = Path(__file__).parent / "fixtures"


# --- Criterion 1: aggregation oracle equivalence ---------------------------------

def test_aggregation_oracle_equivalence():
    started = time.monotonic()

    exhaustive_cases = 0
    for world, viewer, key in exhaustive_small_worlds(max_sources=4, max_assessments=3):
        live = [a for a in world.assessments if a.url_key == key]
        got = compute_page_status(viewer, key, live, world.relations_for(viewer))
        assert (got.status.value, got.basis.value) == oracle_status(viewer, key, world)
        exhaustive_cases += 1
    assert exhaustive_cases > 4000

    random_cases = 0
    for seed in range(1000):
        world = gen_world(seed, max_sources=8, max_assessments=6)
        for source in world.sources:
            for key in world.url_keys:
                live = [a for a in world.assessments if a.url_key == key]
                got = compute_page_status(
                    source.id, key, live, world.relations_for(source.id)
                )
                assert (got.status.value, got.basis.value) == oracle_status(
                    source.id, key, world
                ), f"seed={seed} viewer={source.id} key={key}"
                random_cases += 1
    assert random_cases >= 1000

    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"oracle equivalence took {elapsed:.1f}s, budget 10s"


# --- Criterion 2: canonicalization corpus + idempotence ---------------------------

def test_canonicalization_corpus_and_idempotence():
    report = run_corpus(shipped_corpus_path())
    assert report.total == 40, f"shipped corpus must hold 40 cases, found {report.total}"
    assert report.passed, "\n" + report.describe()

    table = default_policy_table()
    rng = random.Random(20240613)
    for _ in range(500):
        url = fuzz_url(rng)
        once = canonicalize(url, table)
        assert canonicalize(once, table) == once, url


# --- Criterion 3: redirect resolution against the mock server ----------------------

def test_redirect_resolution_suite():
    google_body = (FIXTURES / "google_news_article.html").read_bytes()
    routes = {
        "/ok1": redirect_to("/ok2", 301),
        "/ok2": redirect_to("/final", 302),
        "/final": html_page("<h1>resource</h1>"),
        "/meta": html_page('<meta http-equiv="refresh" content="0;url=/final">'),
        "/loop1": redirect_to("/loop2", 301),
        "/loop2": redirect_to("/loop1", 301),
        "/slow": Route(body=b"late", delay=3.0),
        "/articles/CBMiS2h0dHBz": Route(body=google_body, headers={"Content-Type": "text/html"}),
        "/world/2024/story-about-things": html_page("<h1>story</h1>"),
    }
    for i in range(12):
        routes[f"/deep{i}"] = redirect_to(f"/deep{i+1}", 301)

    with MockServer(routes) as srv:
        fetcher = HttpFetcher(timeout=1.0)
        fetches_before = 0

        def fetch_count():
            return len(srv.requests) - fetches_before

        # 301/302 chain
        result = resolve(srv.url("/ok1"), max_depth=10, fetcher=fetcher)
        assert result.final_url == srv.url("/final")
        assert result.hops == 2
        assert [k.type.value for _, k in result.chain] == ["http_3xx", "http_3xx", "terminal"]
        assert fetch_count() == 3

        # meta refresh
        fetches_before = len(srv.requests)
        result = resolve(srv.url("/meta"), max_depth=10, fetcher=fetcher)
        assert result.final_url == srv.url("/final")
        assert result.hops == 1
        assert result.chain[0][1].type.value == "meta_refresh"
        assert fetch_count() == 2

        # Google News fixture (logical hostnames mapped onto the mock server)
        mapped = HostMappingFetcher(srv, {"news.google.com", "publisher.example"})
        fetches_before = len(srv.requests)
        result = resolve(
            "https://news.google.com/articles/CBMiS2h0dHBz", max_depth=10, fetcher=mapped
        )
        assert result.final_url == "https://publisher.example/world/2024/story-about-things"
        assert result.chain[0][1].type.value == "js_special_case"
        assert fetch_count() == 2

        # loop
        fetches_before = len(srv.requests)
        with pytest.raises(LoopDetected):
            resolve(srv.url("/loop1"), max_depth=10, fetcher=fetcher)
        assert fetch_count() == 2

        # depth exceeded at exactly the fetch cap
        fetches_before = len(srv.requests)
        with pytest.raises(DepthExceeded):
            resolve(srv.url("/deep0"), max_depth=10, fetcher=fetcher)
        assert fetch_count() == 10  # never exceeds maxDepth fetches

        # timeout -> FetchFailed naming the hop
        fetches_before = len(srv.requests)
        with pytest.raises(FetchFailed) as exc_info:
            resolve(srv.url("/slow"), max_depth=10, fetcher=fetcher)
        assert exc_info.value.hop == 0
        fetcher.close()


# --- Criterion 4: cache semantics under randomized sequences -----------------------

DAY = 86400.0

_op = st.one_of(
    st.tuples(st.just("put"), st.integers(0, 5), st.integers(0, 5)),
    st.tuples(st.just("get"), st.lists(st.integers(0, 5), max_size=6), st.just(0)),
    st.tuples(st.just("evict"), st.floats(0.5, 12.0), st.just(0)),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(_op, st.floats(0.0, 2.0)), max_size=60))
def test_cache_semantics_property(ops):
    keys = [f"https://k{i}.example/p" for i in range(6)]
    cache = InMemoryMappingCache()
    model: dict[str, tuple[str, float]] = {}
    now = 0.0
    for (op, a, b), dt in ops:
        now += dt * DAY
        if op == "put":
            if a == b:
                with pytest.raises(Exception):
                    cache.put_mapping(keys[a], keys[b], now=now)
                continue
            cache.put_mapping(keys[a], keys[b], now=now)
            prev = model.get(keys[a])
            model[keys[a]] = (keys[b], max(now, prev[1]) if prev else now)
        elif op == "get":
            asked = [keys[i] for i in a]
            got = cache.get_mappings(asked, now=now)
            # hits only, and exactly the modeled live mappings
            assert got == {k: model[k][0] for k in asked if k in model}
            for k in got:
                model[k] = (model[k][0], now)  # refreshed exactly the hits
        else:
            ttl = a * DAY
            evicted = cache.evict_mappings(now=now, ttl=ttl)
            stale = {k for k, (_, last) in model.items() if now - last > ttl}
            # every evicted mapping was stale; nothing fresh was evicted
            assert evicted == len(stale)
            for k in stale:
                del model[k]
            survivors = cache.get_mappings(keys, now=now)
            assert set(survivors) == set(model)
            for k in survivors:
                model[k] = (model[k][0], now)


def test_cache_semantics_randomized_on_sqlite(tmp_path):
    store = Store.open(tmp_path / "cache-acceptance.db")
    rng = random.Random(777)
    keys = [f"https://k{i}.example/p" for i in range(8)]
    model: dict[str, tuple[str, float]] = {}
    now = 0.0
    for _ in range(400):
        now += rng.uniform(0, DAY)
        roll = rng.random()
        if roll < 0.45:
            orig, target = rng.sample(keys, 2)
            store.put_mapping(orig, target, now=now)
            prev = model.get(orig)
            model[orig] = (target, max(now, prev[1]) if prev else now)
        elif roll < 0.8:
            asked = rng.sample(keys, rng.randint(1, len(keys)))
            got = store.get_mappings(asked, now=now)
            assert got == {k: model[k][0] for k in asked if k in model}
            for k in got:
                model[k] = (model[k][0], now)
        else:
            ttl = rng.uniform(2 * DAY, 10 * DAY)
            evicted = store.evict_mappings(now=now, ttl=ttl)
            stale = {k for k, (_, last) in model.items() if now - last > ttl}
            assert evicted == len(stale)
            for k in stale:
                del model[k]
    store.close()


# --- Criterion 5: AIMD convergence ---------------------------------------------------

def test_aimd_convergence():
    trace = simulate_rate(4.0, 300.0)
    steady = trace.sent_rate(60, 300)
    limited = trace.limited_fraction(60, 300)
    assert 2.0 <= steady <= 4.0, f"steady-state {steady:.2f} outside [2, 4]"
    assert limited < 0.10, f"limited fraction {limited:.1%} >= 10%"

    for limit in (1.0, 2.0, 8.0):
        trace = simulate_rate(limit, 300.0)
        steady = trace.sent_rate(60, 300)
        assert 0.5 * limit <= steady <= limit, (
            f"L={limit}: steady-state {steady:.2f} outside [{0.5 * limit}, {limit}]"
        )
        assert trace.limited_fraction(60, 300) < 0.10


# --- Criterion 6: API differential round-trip + privacy ------------------------------

K1 = "https://news.example/unanimous"
K2 = "https://news.example/contested"
K3 = "https://news.example/fringe"
K4 = "https://news.example/self-assessed"
ALL_KEYS = [K1, K2, K3, K4]


def _script_ten_user_scenario(client, store):
    """10 users, trust/follow edges, assessments, questions; returns tokens."""
    users = [f"u{i}" for i in range(10)]
    tokens = {}
    ids = {}
    for name in users:
        created = client.post(
            "/v1/auth/signup",
            json={"username": name, "password": f"{name}-password", "displayName": name.upper()},
        ).json()
        ids[name] = created["id"]
        tokens[name] = client.post(
            "/v1/auth/login", json={"username": name, "password": f"{name}-password"}
        ).json()["token"]

    def hdr(name):
        return {"Authorization": f"Bearer {tokens[name]}"}

    def put(name, kind, others):
        response = client.put(
            f"/v1/relations/{kind}",
            json={"sourceIds": [ids[o] for o in others]},
            headers=hdr(name),
        )
        assert response.status_code == 200

    put("u0", "trusted", ["u1", "u2"])
    put("u0", "followed", ["u3", "u4"])
    put("u1", "trusted", ["u0", "u5"])
    put("u2", "followed", ["u0"])
    put("u5", "trusted", ["u0", "u1", "u2"])
    put("u6", "trusted", ["u1"])
    put("u7", "trusted", ["u0"])
    put("u8", "followed", ["u9"])
    put("u9", "trusted", ["u8"])

    def assess(name, url, verdict, rationale=None):
        response = client.post(
            "/v1/assessments",
            json={"url": url, "verdict": verdict, "rationale": rationale},
            headers=hdr(name),
        )
        assert response.status_code == 200

    assess("u1", K1, "accurate", "checked the primary source")
    assess("u2", K1, "accurate")
    assess("u9", K1, "inaccurate", "stranger noise for most viewers")
    assess("u1", K2, "accurate")
    assess("u2", K2, "inaccurate", "numbers do not add up")
    assess("u3", K3, "inaccurate")
    assess("u4", K3, "inaccurate")
    assess("u0", K4, "inaccurate", "own call")
    assess("u1", K4, "accurate")

    # questions: untargeted (u5 trusts u0, u1, u2), targeted, anonymous
    client.post(
        "/v1/questions", json={"url": K2, "body": "can anyone verify?"}, headers=hdr("u5")
    )
    client.post(
        "/v1/questions",
        json={"url": K3, "body": "for you two", "targets": [ids["u3"], ids["u9"]]},
        headers=hdr("u6"),
    )
    client.post(
        "/v1/questions",
        json={"url": K4, "body": "asking quietly", "anonymous": True},
        headers=hdr("u7"),
    )
    return users, ids, tokens


def _expected_page_view(store, viewer_id, url_key):
    """Direct core-model evaluation shaped into the wire form."""
    live = store.live_assessments(url_key)
    relations = store.relations_for(viewer_id)
    sources = store.sources_by_id()
    relations_by_owner = {rs.owner_id: rs for rs in store.all_relation_sets()}

    vis = visible_assessments(viewer_id, live, relations, sources)
    questions = visible_questions(
        viewer_id, store.questions_for(url_key), relations_by_owner
    )
    page = compute_page_status(
        viewer_id, url_key, live, relations, has_questions=bool(questions)
    )
    recommendations = recommend_sources(
        viewer_id, live, relations, store.trust_counts(), sources, 10
    )

    def src(s):
        return {"id": s.id, "username": s.username, "displayName": s.display_name}

    return {
        "url": url_key,
        "urlKey": url_key,
        "status": page.status.value,
        "basis": page.basis.value,
        "hasQuestions": page.has_questions,
        "assessments": [
            {
                "id": v.assessment.id,
                "urlKey": v.assessment.url_key,
                "verdict": v.assessment.verdict.value,
                "rationale": v.assessment.rationale,
                "createdAt": v.assessment.created_at.isoformat(),
                "updatedAt": v.assessment.updated_at.isoformat(),
                "assessor": src(v.assessor),
                "relation": v.relation.value,
            }
            for v in vis
        ],
        "questions": [
            {
                "id": q.id,
                "urlKey": q.url_key,
                "body": q.body,
                "createdAt": q.created_at.isoformat(),
                "anonymous": q.anonymous,
                "asker": src(sources[q.asker_id]) if q.asker_id else None,
                "isOwn": q.is_own,
            }
            for q in questions
        ],
        "recommendations": [
            {
                "source": src(sources[r.source_id]),
                "platformTrustCount": r.platform_trust_count,
            }
            for r in recommendations
        ],
    }


def test_api_differential_round_trip(tmp_path):
    store = Store.open(tmp_path / "differential.db")
    app = create_app(store, AppConfig())
    with TestClient(app) as client:
        users, ids, tokens = _script_ten_user_scenario(client, store)

        # spot-check the headline statuses the scenario was built around
        def status_of(name, key):
            response = client.post(
                "/v1/status",
                json={"urls": [key]},
                headers={"Authorization": f"Bearer {tokens[name]}"},
            )
            return response.json()["results"][0]

        assert status_of("u0", K1)["status"] == "accurate"  # unanimous trusted
        assert status_of("u0", K2)["status"] == "split_opinion"
        assert status_of("u0", K3)["status"] == "inaccurate"  # followed fallback
        own = status_of("u0", K4)
        assert own["status"] == "inaccurate" and own["basis"] == "own"

        # byte-identical wire output vs direct core-model evaluation
        for name in users:
            viewer_id = ids[name]
            response = client.post(
                "/v1/status",
                json={"urls": ALL_KEYS},
                headers={"Authorization": f"Bearer {tokens[name]}"},
            )
            assert response.status_code == 200
            got = response.json()["results"]
            want = [_expected_page_view(store, viewer_id, key) for key in ALL_KEYS]
            got_bytes = json.dumps(got, sort_keys=True).encode()
            want_bytes = json.dumps(want, sort_keys=True).encode()
            assert got_bytes == want_bytes, f"wire/core divergence for viewer {name}"

        # privacy: trust edges never leave the owner; anonymity holds
        for name in users:
            headers = {"Authorization": f"Bearer {tokens[name]}"}
            own_trusted = client.get("/v1/relations/trusted", headers=headers).json()
            expected_own = sorted(store.relations_for(ids[name]).trusted)
            assert own_trusted == {"sourceIds": expected_own}

            results = client.post(
                "/v1/status", json={"urls": ALL_KEYS}, headers=headers
            ).json()["results"]
            own_relations = store.relations_for(ids[name])
            for result in results:
                for a in result["assessments"]:
                    tag = relation_tag(ids[name], a["assessor"]["id"], own_relations)
                    assert tag is not None and a["relation"] == tag.value
                for q in result["questions"]:
                    if q["anonymous"]:
                        assert q["asker"] is None
                for rec in result["recommendations"]:
                    assert set(rec.keys()) == {"source", "platformTrustCount"}
    store.close()
