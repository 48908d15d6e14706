import pytest
from fastapi.testclient import TestClient

from trustnet.api.app import AppConfig, create_app
from trustnet.redirects.resolver import FetchResponse
from trustnet.store import Store

KEY = "https://news.example/story"


class StubFetcher:
    """Maps URL -> FetchResponse or Exception, for /v1/urls/resolve tests."""

    def __init__(self, routes: dict):
        self.routes = routes
        self.calls: list[str] = []

    def __call__(self, url: str) -> FetchResponse:
        self.calls.append(url)
        hit = self.routes.get(url)
        if hit is None:
            raise ConnectionError(f"no route for {url}")
        if isinstance(hit, Exception):
            raise hit
        return hit


def terminal(body: bytes = b"<html>article</html>") -> FetchResponse:
    return FetchResponse(200, {"Content-Type": "text/html"}, body)


def hop(location: str) -> FetchResponse:
    return FetchResponse(301, {"Location": location}, b"")


@pytest.fixture
def stub_fetcher():
    return StubFetcher(
        {
            "https://t.example/abc": hop("https://news.example/story"),
            "https://news.example/story": terminal(),
            "https://loop.example/1": hop("https://loop.example/2"),
            "https://loop.example/2": hop("https://loop.example/1"),
            "https://down.example/x": ConnectionError("connection refused"),
        }
    )


@pytest.fixture
def client(tmp_path, stub_fetcher):
    store = Store.open(tmp_path / "api.db")
    app = create_app(store, AppConfig(), fetcher=stub_fetcher)
    with TestClient(app, raise_server_exceptions=True) as c:
        c.store = store
        yield c
    store.close()


def signup(client, username, password="hunter2hunter2") -> dict:
    response = client.post(
        "/v1/auth/signup",
        json={"username": username, "password": password, "displayName": username.title()},
    )
    assert response.status_code == 201, response.text
    return response.json()


def login(client, username, password="hunter2hunter2") -> dict:
    response = client.post(
        "/v1/auth/login", json={"username": username, "password": password}
    )
    assert response.status_code == 200, response.text
    return response.json()


def auth_headers(client, username) -> dict:
    return {"Authorization": f"Bearer {login(client, username)['token']}"}


class TestAuth:
    def test_health_open(self, client):
        response = client.get("/v1/health")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"
        assert "version" in response.json()

    def test_unauthenticated_post_rejected(self, client):
        response = client.post(
            "/v1/assessments", json={"url": KEY, "verdict": "accurate"}
        )
        assert response.status_code == 401
        body = response.json()
        assert body["code"] == "unauthorized" and "message" in body

    def test_signup_login_round_trip(self, client):
        created = signup(client, "alice")
        session = login(client, "alice")
        assert session["source"]["id"] == created["id"]
        assert session["source"]["username"] == "alice"

    def test_duplicate_username_conflict(self, client):
        signup(client, "alice")
        response = client.post(
            "/v1/auth/signup", json={"username": "alice", "password": "hunter2hunter2"}
        )
        assert response.status_code == 409
        assert response.json()["code"] == "username"

    def test_wrong_password(self, client):
        signup(client, "alice")
        response = client.post(
            "/v1/auth/login", json={"username": "alice", "password": "wrong-wrong-wrong"}
        )
        assert response.status_code == 401

    def test_garbage_token(self, client):
        response = client.get(
            "/v1/relations/trusted", headers={"Authorization": "Bearer nope"}
        )
        assert response.status_code == 401

    def test_expired_token_rejected(self, client):
        from trustnet.api import auth as auth_mod

        alice = signup(client, "alice")
        token, _ = auth_mod.issue_session(client.store, alice["id"], now=0.0)  # 1970
        response = client.get(
            "/v1/relations/trusted", headers={"Authorization": f"Bearer {token}"}
        )
        assert response.status_code == 401


class TestRelations:
    def test_put_get_trusted(self, client):
        alice = signup(client, "alice")
        bob = signup(client, "bob")
        headers = auth_headers(client, "alice")
        put = client.put(
            "/v1/relations/trusted", json={"sourceIds": [bob["id"]]}, headers=headers
        )
        assert put.status_code == 200
        assert put.json() == {"sourceIds": [bob["id"]]}
        got = client.get("/v1/relations/trusted", headers=headers)
        assert got.json() == {"sourceIds": [bob["id"]]}

    def test_put_idempotent(self, client):
        alice = signup(client, "alice")
        bob = signup(client, "bob")
        headers = auth_headers(client, "alice")
        for _ in range(2):
            response = client.put(
                "/v1/relations/followed", json={"sourceIds": [bob["id"]]}, headers=headers
            )
            assert response.status_code == 200
            assert response.json() == {"sourceIds": [bob["id"]]}

    def test_self_relation_rejected(self, client):
        alice = signup(client, "alice")
        headers = auth_headers(client, "alice")
        response = client.put(
            "/v1/relations/trusted", json={"sourceIds": [alice["id"]]}, headers=headers
        )
        assert response.status_code == 400

    def test_unknown_source_404(self, client):
        signup(client, "alice")
        headers = auth_headers(client, "alice")
        response = client.put(
            "/v1/relations/trusted", json={"sourceIds": ["missing"]}, headers=headers
        )
        assert response.status_code == 404


class TestAssessmentsAndStatus:
    def test_full_round_trip_trusted_accurate(self, client):
        """signup A,B -> A trusts B -> B assesses k -> A queries k."""
        signup(client, "a")
        b = signup(client, "b")
        a_headers = auth_headers(client, "a")
        b_headers = auth_headers(client, "b")
        client.put(
            "/v1/relations/trusted", json={"sourceIds": [b["id"]]}, headers=a_headers
        )
        posted = client.post(
            "/v1/assessments",
            json={"url": KEY + "?utm_source=feed", "verdict": "accurate", "rationale": "checked"},
            headers=b_headers,
        )
        assert posted.status_code == 200
        assert posted.json()["assessment"]["urlKey"] == KEY  # canonicalized at the edge

        status = client.post("/v1/status", json={"urls": [KEY]}, headers=a_headers)
        assert status.status_code == 200
        (result,) = status.json()["results"]
        assert result["status"] == "accurate"
        assert result["basis"] == "trusted"
        assert result["hasQuestions"] is False
        (assessment,) = result["assessments"]
        assert assessment["assessor"]["username"] == "b"
        assert assessment["relation"] == "trusted"

    def test_upsert_replaces_verdict(self, client):
        signup(client, "a")
        headers = auth_headers(client, "a")
        first = client.post(
            "/v1/assessments", json={"url": KEY, "verdict": "accurate"}, headers=headers
        ).json()["assessment"]
        second = client.post(
            "/v1/assessments", json={"url": KEY, "verdict": "inaccurate"}, headers=headers
        ).json()["assessment"]
        assert first["id"] == second["id"]
        status = client.post("/v1/status", json={"urls": [KEY]}, headers=headers)
        (result,) = status.json()["results"]
        assert result["status"] == "inaccurate" and result["basis"] == "own"

    def test_invalid_verdict(self, client):
        signup(client, "a")
        headers = auth_headers(client, "a")
        response = client.post(
            "/v1/assessments", json={"url": KEY, "verdict": "maybe"}, headers=headers
        )
        assert response.status_code == 400

    def test_invalid_url(self, client):
        signup(client, "a")
        headers = auth_headers(client, "a")
        response = client.post(
            "/v1/assessments", json={"url": "javascript:x", "verdict": "accurate"},
            headers=headers,
        )
        assert response.status_code == 400

    def test_batch_cap(self, client):
        signup(client, "a")
        headers = auth_headers(client, "a")
        urls = [f"https://a.example/{i}" for i in range(201)]
        response = client.post("/v1/status", json={"urls": urls}, headers=headers)
        assert response.status_code == 400
        assert response.json()["code"] == "batch_too_large"

    def test_stranger_assessment_invisible(self, client):
        signup(client, "a")
        signup(client, "stranger")
        s_headers = auth_headers(client, "stranger")
        client.post(
            "/v1/assessments", json={"url": KEY, "verdict": "inaccurate"}, headers=s_headers
        )
        a_headers = auth_headers(client, "a")
        (result,) = client.post(
            "/v1/status", json={"urls": [KEY]}, headers=a_headers
        ).json()["results"]
        assert result["status"] == "none"
        assert result["assessments"] == []
        # but the stranger is recommendable
        assert [r["source"]["username"] for r in result["recommendations"]] == ["stranger"]


class TestQuestions:
    def test_question_relayed_to_trusted(self, client):
        asker = signup(client, "asker")
        signup(client, "viewer")
        viewer_id = client.store.get_source_by_username("viewer").id
        asker_headers = auth_headers(client, "asker")
        client.put(
            "/v1/relations/trusted", json={"sourceIds": [viewer_id]}, headers=asker_headers
        )
        client.post(
            "/v1/questions", json={"url": KEY, "body": "is this real?"}, headers=asker_headers
        )
        viewer_headers = auth_headers(client, "viewer")
        (result,) = client.post(
            "/v1/status", json={"urls": [KEY]}, headers=viewer_headers
        ).json()["results"]
        assert result["hasQuestions"] is True
        (question,) = result["questions"]
        assert question["asker"]["username"] == "asker"

    def test_anonymous_question_hides_asker(self, client):
        signup(client, "asker")
        signup(client, "viewer")
        viewer_id = client.store.get_source_by_username("viewer").id
        asker_headers = auth_headers(client, "asker")
        client.put(
            "/v1/relations/trusted", json={"sourceIds": [viewer_id]}, headers=asker_headers
        )
        client.post(
            "/v1/questions",
            json={"url": KEY, "body": "hmm", "anonymous": True},
            headers=asker_headers,
        )
        viewer_headers = auth_headers(client, "viewer")
        (result,) = client.post(
            "/v1/status", json={"urls": [KEY]}, headers=viewer_headers
        ).json()["results"]
        (question,) = result["questions"]
        assert question["asker"] is None
        assert question["anonymous"] is True

    def test_targeted_question_visible_only_to_targets(self, client):
        signup(client, "asker")
        signup(client, "target")
        signup(client, "other")
        target_id = client.store.get_source_by_username("target").id
        asker_headers = auth_headers(client, "asker")
        client.post(
            "/v1/questions",
            json={"url": KEY, "body": "just for you", "targets": [target_id]},
            headers=asker_headers,
        )
        (to_target,) = client.post(
            "/v1/status", json={"urls": [KEY]}, headers=auth_headers(client, "target")
        ).json()["results"]
        assert to_target["hasQuestions"] is True
        (to_other,) = client.post(
            "/v1/status", json={"urls": [KEY]}, headers=auth_headers(client, "other")
        ).json()["results"]
        assert to_other["hasQuestions"] is False and to_other["questions"] == []

    def test_self_target_rejected(self, client):
        asker = signup(client, "asker")
        headers = auth_headers(client, "asker")
        response = client.post(
            "/v1/questions",
            json={"url": KEY, "targets": [asker["id"]]},
            headers=headers,
        )
        assert response.status_code == 400


class TestLinkStatuses:
    def test_badge_payload(self, client):
        signup(client, "viewer")
        signup(client, "b")
        b_headers = auth_headers(client, "b")
        viewer_headers = auth_headers(client, "viewer")
        b_id = client.store.get_source_by_username("b").id
        client.put(
            "/v1/relations/trusted", json={"sourceIds": [b_id]}, headers=viewer_headers
        )
        client.post(
            "/v1/assessments",
            json={"url": "https://a.example/good", "verdict": "accurate"},
            headers=b_headers,
        )
        response = client.post(
            "/v1/links/status",
            json={"urls": ["https://a.example/good?fbclid=x", "https://a.example/unknown", "not a url"]},
            headers=viewer_headers,
        )
        assert response.status_code == 200
        statuses = response.json()["statuses"]
        assert statuses["https://a.example/good?fbclid=x"]["status"] == "accurate"
        assert statuses["https://a.example/unknown"]["status"] == "none"
        assert "not a url" not in statuses  # silent per-link failure


class TestMappingsAndResolve:
    def test_post_and_get_mappings(self, client):
        signup(client, "a")
        headers = auth_headers(client, "a")
        posted = client.post(
            "/v1/urls/mappings",
            json={
                "mappings": [
                    {"original": "https://t.example/x1", "target": "https://news.example/a"},
                    {"original": "https://t.example/x1/", "target": "https://t.example/x1"},
                ]
            },
            headers=headers,
        )
        assert posted.status_code == 200
        assert posted.json() == {"stored": 1, "ignored": 1}  # self-map after folding
        got = client.get(
            "/v1/urls/mappings",
            params=[("orig", "https://t.example/x1"), ("orig", "https://t.example/nope")],
            headers=headers,
        )
        assert got.json() == {"mappings": {"https://t.example/x1": "https://news.example/a"}}

    def test_resolve_success_caches(self, client, stub_fetcher):
        signup(client, "a")
        headers = auth_headers(client, "a")
        response = client.post(
            "/v1/urls/resolve", json={"url": "https://t.example/abc"}, headers=headers
        )
        assert response.status_code == 200
        body = response.json()
        assert body["outcome"] == "ok"
        assert body["finalKey"] == "https://news.example/story"
        assert body["hops"] == 1 and body["cached"] is False
        # second call is served from the cache, no extra fetches
        calls_before = len(stub_fetcher.calls)
        again = client.post(
            "/v1/urls/resolve", json={"url": "https://t.example/abc"}, headers=headers
        ).json()
        assert again["outcome"] == "ok" and again["cached"] is True
        assert len(stub_fetcher.calls) == calls_before

    def test_resolve_loop(self, client):
        signup(client, "a")
        headers = auth_headers(client, "a")
        body = client.post(
            "/v1/urls/resolve", json={"url": "https://loop.example/1"}, headers=headers
        ).json()
        assert body["outcome"] == "loop"

    def test_resolve_fetch_failure(self, client):
        signup(client, "a")
        headers = auth_headers(client, "a")
        body = client.post(
            "/v1/urls/resolve", json={"url": "https://down.example/x"}, headers=headers
        ).json()
        assert body["outcome"] == "fetch_failed"
        assert body["failedHop"] == 0


class TestSharesAndFeed:
    def test_share_requires_assessment_or_question(self, client):
        signup(client, "sharer")
        headers = auth_headers(client, "sharer")
        rejected = client.post("/v1/shares", json={"url": KEY}, headers=headers)
        assert rejected.status_code == 409
        client.post(
            "/v1/assessments", json={"url": KEY, "verdict": "accurate"}, headers=headers
        )
        accepted = client.post("/v1/shares", json={"url": KEY}, headers=headers)
        assert accepted.status_code == 201

    def test_feed_from_followed_newest_first(self, client):
        sharer = signup(client, "sharer")
        signup(client, "reader")
        sharer_headers = auth_headers(client, "sharer")
        reader_headers = auth_headers(client, "reader")
        client.put(
            "/v1/relations/followed", json={"sourceIds": [sharer["id"]]},
            headers=reader_headers,
        )
        for i in range(3):
            url = f"https://a.example/{i}"
            client.post(
                "/v1/assessments",
                json={"url": url, "verdict": "inaccurate", "rationale": f"r{i}"},
                headers=sharer_headers,
            )
            client.post("/v1/shares", json={"url": url}, headers=sharer_headers)
        feed = client.get("/v1/feed", headers=reader_headers).json()
        assert [item["urlKey"] for item in feed["items"]] == [
            "https://a.example/2",
            "https://a.example/1",
            "https://a.example/0",
        ]
        assert feed["items"][0]["assessment"]["verdict"] == "inaccurate"
        assert feed["items"][0]["sharer"]["username"] == "sharer"

    def test_feed_empty_without_follows(self, client):
        signup(client, "loner")
        headers = auth_headers(client, "loner")
        assert client.get("/v1/feed", headers=headers).json()["items"] == []

    def test_feed_pagination(self, client):
        sharer = signup(client, "sharer")
        signup(client, "reader")
        sharer_headers = auth_headers(client, "sharer")
        reader_headers = auth_headers(client, "reader")
        client.put(
            "/v1/relations/followed", json={"sourceIds": [sharer["id"]]},
            headers=reader_headers,
        )
        for i in range(5):
            url = f"https://a.example/{i}"
            client.post(
                "/v1/assessments", json={"url": url, "verdict": "accurate"},
                headers=sharer_headers,
            )
            client.post("/v1/shares", json={"url": url}, headers=sharer_headers)
        page1 = client.get("/v1/feed?limit=3", headers=reader_headers).json()
        assert len(page1["items"]) == 3 and page1["nextCursor"]
        page2 = client.get(
            f"/v1/feed?limit=3&cursor={page1['nextCursor']}", headers=reader_headers
        ).json()
        assert [i["urlKey"] for i in page2["items"]] == [
            "https://a.example/1",
            "https://a.example/0",
        ]


class TestPrivacy:
    def test_no_endpoint_exposes_foreign_trust_edges(self, client):
        """A's trusted set must be invisible to B through every read path."""
        signup(client, "a")
        signup(client, "b")
        signup(client, "c")
        a_headers = auth_headers(client, "a")
        b_headers = auth_headers(client, "b")
        c_id = client.store.get_source_by_username("c").id
        client.put("/v1/relations/trusted", json={"sourceIds": [c_id]}, headers=a_headers)
        # c assesses, so c shows up in b's view of the page via recommendations
        c_headers = auth_headers(client, "c")
        client.post(
            "/v1/assessments", json={"url": KEY, "verdict": "accurate"}, headers=c_headers
        )
        b_trusted = client.get("/v1/relations/trusted", headers=b_headers).json()
        assert b_trusted == {"sourceIds": []}
        status = client.post("/v1/status", json={"urls": [KEY]}, headers=b_headers).json()
        assert "trusted" not in [r.get("relation") for r in status["results"][0]["assessments"]]
        # platform-wide counts are aggregate; truster identities are not present
        (rec,) = status["results"][0]["recommendations"]
        assert rec["platformTrustCount"] == 1
        assert set(rec.keys()) == {"source", "platformTrustCount"}
        assert set(rec["source"].keys()) == {"id", "username", "displayName"}
        assert rec["source"]["username"] == "c"


class TestThrottling:
    def test_per_token_cap_yields_429(self, tmp_path):
        store = Store.open(tmp_path / "throttle.db")
        app = create_app(store, AppConfig(requests_per_minute=3))
        with TestClient(app) as client:
            client.post(
                "/v1/auth/signup",
                json={"username": "x", "password": "hunter2hunter2"},
            )
            token = client.post(
                "/v1/auth/login", json={"username": "x", "password": "hunter2hunter2"}
            ).json()["token"]
            headers = {"Authorization": f"Bearer {token}"}
            codes = [
                client.get("/v1/relations/trusted", headers=headers).status_code
                for _ in range(5)
            ]
        assert codes[:3] == [200, 200, 200]
        assert set(codes[3:]) == {429}
        store.close()
