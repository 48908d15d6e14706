"""The HTTP API: JSON over HTTP/1.1, bearer-token auth, {code, message} errors.

Endpoints (all under /v1):
  POST /auth/signup, /auth/login
  GET/PUT /relations/trusted, /relations/followed
  POST /assessments (upsert), POST /questions
  POST /status            pane payload per URL (batch, cap 200)
  POST /links/status      badge payload per URL (batch, cap 200)
  GET  /urls/mappings     cached redirect targets (?orig=...)
  POST /urls/mappings     client-discovered mappings
  POST /urls/resolve      server-side resolution for CORS-blocked links
  POST /shares, GET /feed
  GET  /health

Raw URLs are accepted at the edge and canonicalized here, so clients only
need the cheap href-cleaning step.
"""

from __future__ import annotations

import logging
import threading
import time
from collections import deque
from contextlib import asynccontextmanager
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from trustnet import __version__
from trustnet.api import auth, service
from trustnet.api.errors import ApiError
from trustnet.model import Verdict
from trustnet.redirects.cache import DEFAULT_MAPPING_TTL
from trustnet.redirects.ratelimit import DomainGovernor
from trustnet.redirects.resolver import (
    DEFAULT_MAX_DEPTH,
    FetchFailed,
    Fetcher,
    HttpFetcher,
    LoopDetected,
    ResolveError,
    resolve,
)
from trustnet.store import ConstraintViolation, Store
from trustnet.urlcanon import (
    InvalidHref,
    PolicyTable,
    UnsupportedScheme,
    canonicalize,
    default_policy_table,
)

logger = logging.getLogger("trustnet.api")

BATCH_CAP = 200
FEED_PAGE_LIMIT = 50


@dataclass
class AppConfig:
    max_depth: int = DEFAULT_MAX_DEPTH
    mapping_ttl: float = DEFAULT_MAPPING_TTL
    eviction_interval: float = 3600.0  # seconds between cache sweeps
    requests_per_minute: int = 600  # basic per-token cap
    policy_table: PolicyTable = field(default_factory=default_policy_table)


class SignupRequest(BaseModel):
    username: str = Field(min_length=1, max_length=64)
    password: str = Field(min_length=8, max_length=1024)
    displayName: str | None = None


class LoginRequest(BaseModel):
    username: str
    password: str


class RelationsPut(BaseModel):
    sourceIds: list[str]


class AssessmentPost(BaseModel):
    url: str
    verdict: str
    rationale: str | None = None


class QuestionPost(BaseModel):
    url: str
    body: str | None = None
    anonymous: bool = False
    targets: list[str] | None = None


class UrlBatch(BaseModel):
    urls: list[str]


class MappingPair(BaseModel):
    original: str
    target: str


class MappingsPost(BaseModel):
    mappings: list[MappingPair]


class ResolvePost(BaseModel):
    url: str


class SharePost(BaseModel):
    url: str


class _TokenBucketLog:
    """Basic per-token request cap over a sliding minute."""

    def __init__(self, per_minute: int):
        self.per_minute = per_minute
        self._hits: dict[str, deque[float]] = {}
        self._lock = threading.Lock()

    def check(self, token: str, now: float | None = None) -> bool:
        now = time.time() if now is None else now
        with self._lock:
            window = self._hits.setdefault(token, deque())
            while window and window[0] <= now - 60.0:
                window.popleft()
            if len(window) >= self.per_minute:
                return False
            window.append(now)
            return True


def create_app(
    store: Store,
    config: AppConfig | None = None,
    fetcher: Fetcher | None = None,
) -> FastAPI:
    """Build the service around an open store.

    ``fetcher`` is injectable so tests can point resolution at fixtures; by
    default a real HTTP client is created lazily on first use.
    """
    config = config or AppConfig()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        thread = threading.Thread(target=eviction_loop, daemon=True)
        thread.start()
        yield
        state["stop_eviction"].set()

    app = FastAPI(title="trustnet", version=__version__, lifespan=lifespan)
    table = config.policy_table
    governor = DomainGovernor(on_adjust=store.save_domain_rate)
    for state in store.load_domain_rates():
        governor.seed_state(state)
    request_log = _TokenBucketLog(config.requests_per_minute)
    state: dict = {"fetcher": fetcher, "stop_eviction": threading.Event()}

    def get_fetcher() -> Fetcher:
        if state["fetcher"] is None:
            state["fetcher"] = HttpFetcher()
        return state["fetcher"]

    def canonical_or_400(url: str) -> str:
        try:
            return canonicalize(url, table)
        except (InvalidHref, UnsupportedScheme) as exc:
            raise ApiError(400, "invalid_url", str(exc)) from exc

    # -- auth plumbing ------------------------------------------------------

    def current_viewer(authorization: str | None = Header(default=None)):
        if not authorization or not authorization.startswith("Bearer "):
            raise ApiError(401, "unauthorized", "missing bearer token")
        token = authorization.removeprefix("Bearer ").strip()
        source_id = auth.authenticate(store, token)
        if source_id is None:
            raise ApiError(401, "unauthorized", "invalid or expired token")
        if not request_log.check(token):
            raise ApiError(429, "throttled", "per-token request cap exceeded")
        viewer = store.get_source(source_id)
        if viewer is None:
            raise ApiError(401, "unauthorized", "account no longer exists")
        return viewer

    # -- error mapping ------------------------------------------------------

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(ConstraintViolation)
    async def handle_conflict(request: Request, exc: ConstraintViolation):
        status = 404 if exc.constraint == "source_fk" else 409
        return JSONResponse(
            status_code=status, content={"code": exc.constraint, "message": str(exc)}
        )

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        started = time.monotonic()
        response: Response = await call_next(request)
        logger.info(
            "%s %s -> %d (%.1f ms)",
            request.method,
            request.url.path,
            response.status_code,
            (time.monotonic() - started) * 1000,
        )
        return response

    # -- background eviction --------------------------------------------------

    def eviction_loop():
        stop = state["stop_eviction"]
        while not stop.wait(config.eviction_interval):
            evicted = store.evict_mappings(ttl=config.mapping_ttl)
            if evicted:
                logger.info("evicted %d stale redirect mappings", evicted)

    # -- endpoints -------------------------------------------------------------

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/auth/signup", status_code=201)
    def signup(body: SignupRequest):
        display_name = body.displayName or body.username
        source = store.add_source(body.username, display_name)
        salt, digest, params = auth.hash_password(body.password)
        store.set_credential(source.id, salt, digest, params)
        return {
            "id": source.id,
            "username": source.username,
            "displayName": source.display_name,
            "createdAt": source.created_at.isoformat(),
        }

    @app.post("/v1/auth/login")
    def login(body: LoginRequest):
        source = store.get_source_by_username(body.username)
        credential = store.get_credential(source.id) if source else None
        if source is None or credential is None or not auth.verify_password(
            body.password, credential[0], credential[1], credential[2]
        ):
            raise ApiError(401, "unauthorized", "unknown username or wrong password")
        token, expires_at = auth.issue_session(store, source.id)
        return {
            "token": token,
            "expiresAt": expires_at,
            "source": service.source_view(source),
        }

    def _relations_endpoint(kind: str):
        def get_relations(viewer=Depends(current_viewer)):
            relations = store.relations_for(viewer.id)
            ids = relations.trusted if kind == "trusted" else relations.followed
            return {"sourceIds": sorted(ids)}

        def put_relations(body: RelationsPut, viewer=Depends(current_viewer)):
            if viewer.id in body.sourceIds:
                raise ApiError(400, "invalid_relation", "cannot trust or follow yourself")
            relations = store.set_relations(viewer.id, kind, body.sourceIds)
            ids = relations.trusted if kind == "trusted" else relations.followed
            return {"sourceIds": sorted(ids)}

        app.get(f"/v1/relations/{kind}")(get_relations)
        app.put(f"/v1/relations/{kind}")(put_relations)

    _relations_endpoint("trusted")
    _relations_endpoint("followed")

    @app.post("/v1/assessments")
    def post_assessment(body: AssessmentPost, viewer=Depends(current_viewer)):
        try:
            verdict = Verdict(body.verdict)
        except ValueError:
            raise ApiError(400, "invalid_verdict", f"unknown verdict {body.verdict!r}")
        url_key = canonical_or_400(body.url)
        assessment = store.upsert_assessment(viewer.id, url_key, verdict, body.rationale)
        return {
            "assessment": {
                "id": assessment.id,
                "urlKey": assessment.url_key,
                "verdict": assessment.verdict.value,
                "rationale": assessment.rationale,
                "createdAt": assessment.created_at.isoformat(),
                "updatedAt": assessment.updated_at.isoformat(),
            }
        }

    @app.post("/v1/questions", status_code=201)
    def post_question(body: QuestionPost, viewer=Depends(current_viewer)):
        url_key = canonical_or_400(body.url)
        targets = frozenset(body.targets) if body.targets is not None else None
        try:
            question = store.add_question(
                viewer.id, url_key, body.body, body.anonymous, targets
            )
        except ValueError as exc:
            raise ApiError(400, "invalid_question", str(exc)) from exc
        return {
            "question": {
                "id": question.id,
                "urlKey": question.url_key,
                "body": question.body,
                "anonymous": question.anonymous,
                "createdAt": question.created_at.isoformat(),
            }
        }

    def _check_batch(urls: list[str]):
        if len(urls) > BATCH_CAP:
            raise ApiError(
                400, "batch_too_large", f"at most {BATCH_CAP} urls per call"
            )

    @app.post("/v1/status")
    def post_status(body: UrlBatch, viewer=Depends(current_viewer)):
        _check_batch(body.urls)
        results = []
        for raw in body.urls:
            url_key = canonical_or_400(raw)
            results.append(service.page_view(store, viewer.id, url_key, raw_url=raw))
        return {"results": results}

    @app.post("/v1/links/status")
    def post_links_status(body: UrlBatch, viewer=Depends(current_viewer)):
        _check_batch(body.urls)
        by_raw: dict[str, str] = {}
        for raw in body.urls:
            try:
                by_raw[raw] = canonicalize(raw, table)
            except (InvalidHref, UnsupportedScheme):
                continue  # silent per-link failure: badge simply absent
        views = service.link_status_views(store, viewer.id, sorted(set(by_raw.values())))
        return {"statuses": {raw: views[key] for raw, key in by_raw.items()}}

    @app.get("/v1/urls/mappings")
    def get_mappings(
        orig: list[str] = Query(default=[]), viewer=Depends(current_viewer)
    ):
        _check_batch(orig)
        by_raw = {}
        for raw in orig:
            try:
                by_raw[raw] = canonicalize(raw, table)
            except (InvalidHref, UnsupportedScheme):
                continue
        hits = store.get_mappings(sorted(set(by_raw.values())))
        return {
            "mappings": {
                raw: hits[key] for raw, key in by_raw.items() if key in hits
            }
        }

    @app.post("/v1/urls/mappings")
    def post_mappings(body: MappingsPost, viewer=Depends(current_viewer)):
        _check_batch([m.original for m in body.mappings])
        stored = 0
        ignored = 0
        for pair in body.mappings:
            try:
                original_key = canonicalize(pair.original, table)
                target_key = canonicalize(pair.target, table)
            except (InvalidHref, UnsupportedScheme):
                ignored += 1
                continue
            if original_key == target_key:
                ignored += 1  # canonicalization folded them: nothing to learn
                continue
            store.put_mapping(original_key, target_key)
            stored += 1
        return {"stored": stored, "ignored": ignored}

    @app.post("/v1/urls/resolve")
    def post_resolve(body: ResolvePost, viewer=Depends(current_viewer)):
        url_key = canonical_or_400(body.url)
        cached = store.get_mappings([url_key])
        if url_key in cached:
            return {
                "url": body.url,
                "urlKey": url_key,
                "outcome": "ok",
                "finalKey": cached[url_key],
                "cached": True,
            }
        try:
            result = resolve(
                body.url,
                max_depth=config.max_depth,
                fetcher=get_fetcher(),
                governor=governor,
                policy_table=table,
            )
        except LoopDetected:
            return {"url": body.url, "urlKey": url_key, "outcome": "loop"}
        except FetchFailed as exc:
            return {
                "url": body.url,
                "urlKey": url_key,
                "outcome": "fetch_failed",
                "failedHop": exc.hop,
            }
        except ResolveError:
            return {"url": body.url, "urlKey": url_key, "outcome": "depth_exceeded"}
        final_key = canonicalize(result.final_url, table)
        if final_key != url_key:
            store.put_mapping(url_key, final_key)
        return {
            "url": body.url,
            "urlKey": url_key,
            "outcome": "ok",
            "finalUrl": result.final_url,
            "finalKey": final_key,
            "hops": result.hops,
            "cached": False,
        }

    @app.post("/v1/shares", status_code=201)
    def post_share(body: SharePost, viewer=Depends(current_viewer)):
        url_key = canonical_or_400(body.url)
        share = store.add_share(viewer.id, url_key)
        return {
            "share": {
                "id": share.id,
                "urlKey": share.url_key,
                "createdAt": share.created_at.isoformat(),
            }
        }

    @app.get("/v1/feed")
    def get_feed(
        cursor: str | None = None,
        limit: int = Query(default=FEED_PAGE_LIMIT, ge=1, le=FEED_PAGE_LIMIT),
        viewer=Depends(current_viewer),
    ):
        relations = store.relations_for(viewer.id)
        items = store.feed_for(relations.followed, limit=limit, cursor=cursor)
        sources = store.sources_by_id()
        out = []
        for item in items:
            sharer = sources.get(item.sharer_id)
            if sharer is None:
                continue
            entry = {
                "id": item.id,
                "urlKey": item.url_key,
                "createdAt": item.created_at.isoformat(),
                "sharer": service.source_view(sharer),
            }
            assessment = store.live_assessment_for(item.sharer_id, item.url_key)
            if assessment is not None:
                entry["assessment"] = {
                    "verdict": assessment.verdict.value,
                    "rationale": assessment.rationale,
                }
            questions = [
                q
                for q in store.questions_for(item.url_key)
                if q.asker_id == item.sharer_id and not q.anonymous
            ]
            if questions:
                entry["question"] = {"body": questions[-1].body}
            out.append(entry)
        next_cursor = Store.feed_cursor(items[-1]) if len(items) == limit else None
        return {"items": out, "nextCursor": next_cursor}

    return app
