"""Durable persistence on embedded sqlite.

Holds sources, relations, assessments (live row plus superseded history),
questions, shares, redirect mappings, domain rate states, credentials and
sessions. All uniqueness and referential constraints from the domain model
are enforced at this layer; writes are serialized through one connection
guarded by a lock, reads see committed snapshots.

The interface is repository-shaped so a networked database could
substitute; at the intended scale (dozens of users, hundreds of
assessments) a single file is plenty.
"""

from __future__ import annotations

import json
import re
import sqlite3
import threading
import time
import uuid
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator

from trustnet.model import (
    Assessment,
    Question,
    RelationSet,
    ShareItem,
    Source,
    Verdict,
    utcnow,
)
from trustnet.redirects.cache import InvalidMapping, RedirectMapping
from trustnet.redirects.ratelimit import DomainRateState

SCHEMA_VERSION = 1


class SchemaError(RuntimeError):
    """Storage file is corrupt or was written by a newer schema."""


class ConstraintViolation(RuntimeError):
    def __init__(self, constraint: str, message: str | None = None):
        super().__init__(message or f"constraint violated: {constraint}")
        self.constraint = constraint


class StorageUnavailable(RuntimeError):
    pass


_SCHEMA = """
CREATE TABLE sources (
    id TEXT PRIMARY KEY,
    username TEXT NOT NULL UNIQUE,
    display_name TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE credentials (
    source_id TEXT PRIMARY KEY REFERENCES sources(id),
    salt BLOB NOT NULL,
    hash BLOB NOT NULL,
    params TEXT NOT NULL
);
CREATE TABLE sessions (
    token_hash TEXT PRIMARY KEY,
    source_id TEXT NOT NULL REFERENCES sources(id),
    expires_at REAL NOT NULL
);
CREATE TABLE relations (
    owner_id TEXT NOT NULL REFERENCES sources(id),
    other_id TEXT NOT NULL REFERENCES sources(id),
    kind TEXT NOT NULL CHECK (kind IN ('trusted', 'followed')),
    PRIMARY KEY (owner_id, other_id, kind),
    CHECK (owner_id <> other_id)
);
CREATE TABLE assessments (
    rowid_pk INTEGER PRIMARY KEY,
    id TEXT NOT NULL,
    assessor_id TEXT NOT NULL REFERENCES sources(id),
    url_key TEXT NOT NULL,
    verdict TEXT NOT NULL CHECK (verdict IN ('accurate', 'inaccurate')),
    rationale TEXT,
    created_at TEXT NOT NULL,
    updated_at TEXT NOT NULL,
    live INTEGER NOT NULL DEFAULT 1
);
CREATE UNIQUE INDEX assessments_one_live
    ON assessments(assessor_id, url_key) WHERE live = 1;
CREATE INDEX assessments_by_key ON assessments(url_key) WHERE live = 1;
CREATE TABLE questions (
    id TEXT PRIMARY KEY,
    asker_id TEXT NOT NULL REFERENCES sources(id),
    url_key TEXT NOT NULL,
    body TEXT,
    anonymous INTEGER NOT NULL DEFAULT 0,
    has_targets INTEGER NOT NULL DEFAULT 0,
    created_at TEXT NOT NULL
);
CREATE INDEX questions_by_key ON questions(url_key);
CREATE TABLE question_targets (
    question_id TEXT NOT NULL REFERENCES questions(id),
    target_id TEXT NOT NULL REFERENCES sources(id),
    PRIMARY KEY (question_id, target_id)
);
CREATE TABLE shares (
    id TEXT PRIMARY KEY,
    sharer_id TEXT NOT NULL REFERENCES sources(id),
    url_key TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE INDEX shares_by_time ON shares(created_at DESC, id DESC);
CREATE TABLE redirect_mappings (
    original_key TEXT PRIMARY KEY,
    target_key TEXT NOT NULL,
    created_at REAL NOT NULL,
    last_requested_at REAL NOT NULL,
    CHECK (original_key <> target_key)
);
CREATE TABLE domain_rates (
    domain TEXT PRIMARY KEY,
    rate_per_sec REAL NOT NULL,
    floor REAL NOT NULL,
    ceiling REAL NOT NULL,
    last_adjusted_at REAL NOT NULL
);
"""

_UNIQUE_RE = re.compile(r"UNIQUE constraint failed: \w+\.(\w+)")


def _map_integrity_error(exc: sqlite3.IntegrityError) -> ConstraintViolation:
    message = str(exc)
    match = _UNIQUE_RE.search(message)
    if match:
        name = match.group(1)
        if name in ("assessor_id", "url_key"):
            name = "one_live_assessment"
        return ConstraintViolation(name, message)
    if "FOREIGN KEY" in message:
        return ConstraintViolation("source_fk", message)
    if "CHECK" in message:
        return ConstraintViolation("check", message)
    return ConstraintViolation("unknown", message)


def _new_id() -> str:
    return uuid.uuid4().hex


def _ts(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def _dt(text: str) -> datetime:
    return datetime.fromisoformat(text)


class Store:
    """Handle on one sqlite database file (or ':memory:')."""

    def __init__(self, connection: sqlite3.Connection, path: str):
        self._conn = connection
        self._path = path
        self._lock = threading.RLock()
        self._tx_depth = 0

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def open(cls, path: str | Path) -> "Store":
        """Open or create the database, migrating older schemas forward."""
        path = str(path)
        try:
            # isolation_level=None: autocommit mode, transactions are managed
            # explicitly by transaction().
            conn = sqlite3.connect(path, check_same_thread=False, isolation_level=None)
            conn.execute("PRAGMA foreign_keys = ON")
            conn.execute("PRAGMA journal_mode = WAL")
            version = conn.execute("PRAGMA user_version").fetchone()[0]
        except sqlite3.DatabaseError as exc:
            raise SchemaError(f"cannot open {path!r}: {exc}") from exc
        if version > SCHEMA_VERSION:
            conn.close()
            raise SchemaError(
                f"{path!r} has schema version {version}, newer than supported {SCHEMA_VERSION}"
            )
        try:
            if version == 0:
                has_tables = conn.execute(
                    "SELECT 1 FROM sqlite_master WHERE type='table' AND name='sources'"
                ).fetchone()
                if not has_tables:
                    conn.executescript(_SCHEMA)
            elif version < SCHEMA_VERSION:
                # Forward migrations slot in here version by version.
                pass
            conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
        except sqlite3.DatabaseError as exc:
            conn.close()
            raise SchemaError(f"cannot initialize {path!r}: {exc}") from exc
        return cls(conn, path)

    @property
    def schema_version(self) -> int:
        return self._conn.execute("PRAGMA user_version").fetchone()[0]

    def close(self) -> None:
        self._conn.close()

    @contextmanager
    def transaction(self) -> Iterator[sqlite3.Connection]:
        """All-or-nothing scope; nested use joins the outer transaction."""
        with self._lock:
            if self._tx_depth > 0:
                self._tx_depth += 1
                try:
                    yield self._conn
                finally:
                    self._tx_depth -= 1
                return
            self._tx_depth = 1
            try:
                self._conn.execute("BEGIN IMMEDIATE")
                yield self._conn
                self._conn.execute("COMMIT")
            except sqlite3.IntegrityError as exc:
                self._conn.execute("ROLLBACK")
                raise _map_integrity_error(exc) from exc
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise
            finally:
                self._tx_depth = 0

    # -- sources & credentials ---------------------------------------------

    def add_source(
        self, username: str, display_name: str, created_at: datetime | None = None
    ) -> Source:
        source = Source(
            id=_new_id(),
            username=username,
            display_name=display_name,
            created_at=created_at or utcnow(),
        )
        with self.transaction() as conn:
            conn.execute(
                "INSERT INTO sources (id, username, display_name, created_at) VALUES (?,?,?,?)",
                (source.id, source.username, source.display_name, _ts(source.created_at)),
            )
        return source

    def get_source(self, source_id: str) -> Source | None:
        row = self._conn.execute(
            "SELECT id, username, display_name, created_at FROM sources WHERE id = ?",
            (source_id,),
        ).fetchone()
        return self._source_from_row(row)

    def get_source_by_username(self, username: str) -> Source | None:
        row = self._conn.execute(
            "SELECT id, username, display_name, created_at FROM sources WHERE username = ?",
            (username,),
        ).fetchone()
        return self._source_from_row(row)

    def list_sources(self) -> list[Source]:
        rows = self._conn.execute(
            "SELECT id, username, display_name, created_at FROM sources ORDER BY created_at, id"
        ).fetchall()
        return [self._source_from_row(r) for r in rows]

    def sources_by_id(self) -> dict[str, Source]:
        return {s.id: s for s in self.list_sources()}

    @staticmethod
    def _source_from_row(row) -> Source | None:
        if row is None:
            return None
        return Source(id=row[0], username=row[1], display_name=row[2], created_at=_dt(row[3]))

    def set_credential(self, source_id: str, salt: bytes, hash_: bytes, params: str) -> None:
        with self.transaction() as conn:
            conn.execute(
                "INSERT INTO credentials (source_id, salt, hash, params) VALUES (?,?,?,?) "
                "ON CONFLICT(source_id) DO UPDATE SET salt=excluded.salt, "
                "hash=excluded.hash, params=excluded.params",
                (source_id, salt, hash_, params),
            )

    def get_credential(self, source_id: str) -> tuple[bytes, bytes, str] | None:
        row = self._conn.execute(
            "SELECT salt, hash, params FROM credentials WHERE source_id = ?",
            (source_id,),
        ).fetchone()
        return (row[0], row[1], row[2]) if row else None

    # -- sessions ------------------------------------------------------------

    def create_session(self, token_hash: str, source_id: str, expires_at: float) -> None:
        with self.transaction() as conn:
            conn.execute(
                "INSERT INTO sessions (token_hash, source_id, expires_at) VALUES (?,?,?)",
                (token_hash, source_id, expires_at),
            )

    def get_session(self, token_hash: str) -> tuple[str, float] | None:
        row = self._conn.execute(
            "SELECT source_id, expires_at FROM sessions WHERE token_hash = ?",
            (token_hash,),
        ).fetchone()
        return (row[0], row[1]) if row else None

    def purge_expired_sessions(self, now: float | None = None) -> int:
        now = time.time() if now is None else now
        with self.transaction() as conn:
            cur = conn.execute("DELETE FROM sessions WHERE expires_at <= ?", (now,))
            return cur.rowcount

    # -- relations -----------------------------------------------------------

    def set_relations(self, owner_id: str, kind: str, other_ids: Iterable[str]) -> RelationSet:
        """Replace the owner's trusted or followed set (idempotent PUT)."""
        assert kind in ("trusted", "followed")
        others = sorted(set(other_ids))
        with self.transaction() as conn:
            if not conn.execute("SELECT 1 FROM sources WHERE id=?", (owner_id,)).fetchone():
                raise ConstraintViolation("source_fk", f"unknown owner {owner_id}")
            conn.execute(
                "DELETE FROM relations WHERE owner_id = ? AND kind = ?", (owner_id, kind)
            )
            conn.executemany(
                "INSERT INTO relations (owner_id, other_id, kind) VALUES (?,?,?)",
                [(owner_id, other, kind) for other in others],
            )
        return self.relations_for(owner_id)

    def relations_for(self, owner_id: str) -> RelationSet:
        rows = self._conn.execute(
            "SELECT other_id, kind FROM relations WHERE owner_id = ?", (owner_id,)
        ).fetchall()
        trusted = frozenset(r[0] for r in rows if r[1] == "trusted")
        followed = frozenset(r[0] for r in rows if r[1] == "followed")
        return RelationSet(owner_id, trusted, followed)

    def all_relation_sets(self) -> list[RelationSet]:
        """All owners' relations. Internal aggregation input only: trust
        edges must never leave the service except via the owner's own read."""
        rows = self._conn.execute("SELECT owner_id, other_id, kind FROM relations").fetchall()
        by_owner: dict[str, dict[str, set[str]]] = {}
        for owner, other, kind in rows:
            by_owner.setdefault(owner, {"trusted": set(), "followed": set()})[kind].add(other)
        return [
            RelationSet(owner, frozenset(sets["trusted"]), frozenset(sets["followed"]))
            for owner, sets in by_owner.items()
        ]

    def trust_counts(self) -> dict[str, int]:
        rows = self._conn.execute(
            "SELECT other_id, COUNT(*) FROM relations WHERE kind='trusted' GROUP BY other_id"
        ).fetchall()
        return {r[0]: r[1] for r in rows}

    # -- assessments -----------------------------------------------------------

    def upsert_assessment(
        self,
        assessor_id: str,
        url_key: str,
        verdict: Verdict,
        rationale: str | None = None,
        now: datetime | None = None,
    ) -> Assessment:
        """Create or replace the live assessment for (assessor, url_key).

        The live row keeps its id across updates; the superseded version is
        retained as a history row (live=0) and never aggregated.
        """
        now = now or utcnow()
        with self.transaction() as conn:
            row = conn.execute(
                "SELECT rowid_pk, id, created_at, verdict, rationale, updated_at "
                "FROM assessments WHERE assessor_id=? AND url_key=? AND live=1",
                (assessor_id, url_key),
            ).fetchone()
            if row is None:
                assessment = Assessment(
                    id=_new_id(),
                    assessor_id=assessor_id,
                    url_key=url_key,
                    verdict=verdict,
                    rationale=rationale,
                    created_at=now,
                    updated_at=now,
                )
                conn.execute(
                    "INSERT INTO assessments (id, assessor_id, url_key, verdict, rationale,"
                    " created_at, updated_at, live) VALUES (?,?,?,?,?,?,?,1)",
                    (
                        assessment.id,
                        assessor_id,
                        url_key,
                        verdict.value,
                        rationale,
                        _ts(now),
                        _ts(now),
                    ),
                )
                return assessment
            rowid, aid, created_at, old_verdict, old_rationale, old_updated = row
            conn.execute(
                "INSERT INTO assessments (id, assessor_id, url_key, verdict, rationale,"
                " created_at, updated_at, live) VALUES (?,?,?,?,?,?,?,0)",
                (aid, assessor_id, url_key, old_verdict, old_rationale, created_at, old_updated),
            )
            conn.execute(
                "UPDATE assessments SET verdict=?, rationale=?, updated_at=? WHERE rowid_pk=?",
                (verdict.value, rationale, _ts(now), rowid),
            )
            return Assessment(
                id=aid,
                assessor_id=assessor_id,
                url_key=url_key,
                verdict=verdict,
                rationale=rationale,
                created_at=_dt(created_at),
                updated_at=now,
            )

    _ASSESSMENT_COLS = "id, assessor_id, url_key, verdict, rationale, created_at, updated_at"

    @classmethod
    def _assessment_from_row(cls, row) -> Assessment:
        return Assessment(
            id=row[0],
            assessor_id=row[1],
            url_key=row[2],
            verdict=Verdict(row[3]),
            rationale=row[4],
            created_at=_dt(row[5]),
            updated_at=_dt(row[6]),
        )

    def live_assessments(self, url_key: str) -> list[Assessment]:
        rows = self._conn.execute(
            f"SELECT {self._ASSESSMENT_COLS} FROM assessments "
            "WHERE url_key=? AND live=1 ORDER BY updated_at, id",
            (url_key,),
        ).fetchall()
        return [self._assessment_from_row(r) for r in rows]

    def live_assessments_many(self, url_keys: Iterable[str]) -> dict[str, list[Assessment]]:
        out: dict[str, list[Assessment]] = {}
        for key in url_keys:
            out[key] = self.live_assessments(key)
        return out

    def live_assessment_for(self, assessor_id: str, url_key: str) -> Assessment | None:
        rows = self._conn.execute(
            f"SELECT {self._ASSESSMENT_COLS} FROM assessments "
            "WHERE assessor_id=? AND url_key=? AND live=1",
            (assessor_id, url_key),
        ).fetchall()
        return self._assessment_from_row(rows[0]) if rows else None

    def assessment_row_count(self, assessor_id: str, url_key: str, live_only: bool = False) -> int:
        query = "SELECT COUNT(*) FROM assessments WHERE assessor_id=? AND url_key=?"
        if live_only:
            query += " AND live=1"
        return self._conn.execute(query, (assessor_id, url_key)).fetchone()[0]

    # -- questions ---------------------------------------------------------------

    def add_question(
        self,
        asker_id: str,
        url_key: str,
        body: str | None = None,
        anonymous: bool = False,
        targets: frozenset[str] | None = None,
        now: datetime | None = None,
    ) -> Question:
        question = Question(
            id=_new_id(),
            asker_id=asker_id,
            url_key=url_key,
            body=body,
            anonymous=anonymous,
            targets=targets,
            created_at=now or utcnow(),
        )
        with self.transaction() as conn:
            conn.execute(
                "INSERT INTO questions (id, asker_id, url_key, body, anonymous, has_targets,"
                " created_at) VALUES (?,?,?,?,?,?,?)",
                (
                    question.id,
                    asker_id,
                    url_key,
                    body,
                    int(anonymous),
                    int(targets is not None),
                    _ts(question.created_at),
                ),
            )
            if targets:
                conn.executemany(
                    "INSERT INTO question_targets (question_id, target_id) VALUES (?,?)",
                    [(question.id, t) for t in sorted(targets)],
                )
        return question

    def questions_for(self, url_key: str) -> list[Question]:
        rows = self._conn.execute(
            "SELECT id, asker_id, url_key, body, anonymous, has_targets, created_at "
            "FROM questions WHERE url_key=? ORDER BY created_at, id",
            (url_key,),
        ).fetchall()
        return [self._question_from_row(r) for r in rows]

    def _question_from_row(self, row) -> Question:
        targets = None
        if row[5]:
            target_rows = self._conn.execute(
                "SELECT target_id FROM question_targets WHERE question_id=?", (row[0],)
            ).fetchall()
            targets = frozenset(t[0] for t in target_rows)
        return Question(
            id=row[0],
            asker_id=row[1],
            url_key=row[2],
            body=row[3],
            anonymous=bool(row[4]),
            targets=targets,
            created_at=_dt(row[6]),
        )

    # -- shares & feed --------------------------------------------------------------

    def add_share(self, sharer_id: str, url_key: str, now: datetime | None = None) -> ShareItem:
        """Record a share; the sharer must have a live assessment or question."""
        now = now or utcnow()
        with self.transaction() as conn:
            has_assessment = conn.execute(
                "SELECT 1 FROM assessments WHERE assessor_id=? AND url_key=? AND live=1",
                (sharer_id, url_key),
            ).fetchone()
            has_question = conn.execute(
                "SELECT 1 FROM questions WHERE asker_id=? AND url_key=?",
                (sharer_id, url_key),
            ).fetchone()
            if not has_assessment and not has_question:
                raise ConstraintViolation(
                    "share_requires_assessment_or_question",
                    "cannot share a page without first assessing or questioning it",
                )
            share = ShareItem(id=_new_id(), sharer_id=sharer_id, url_key=url_key, created_at=now)
            conn.execute(
                "INSERT INTO shares (id, sharer_id, url_key, created_at) VALUES (?,?,?,?)",
                (share.id, sharer_id, url_key, _ts(now)),
            )
        return share

    def feed_for(
        self, followed_ids: Iterable[str], limit: int = 50, cursor: str | None = None
    ) -> list[ShareItem]:
        """Shares by the given sharers, newest first, keyset-paginated."""
        ids = sorted(set(followed_ids))
        if not ids:
            return []
        params: list = list(ids)
        query = (
            "SELECT id, sharer_id, url_key, created_at FROM shares "
            f"WHERE sharer_id IN ({','.join('?' * len(ids))})"
        )
        if cursor:
            created, _, share_id = cursor.partition("~")
            query += " AND (created_at < ? OR (created_at = ? AND id < ?))"
            params += [created, created, share_id]
        query += " ORDER BY created_at DESC, id DESC LIMIT ?"
        params.append(limit)
        rows = self._conn.execute(query, params).fetchall()
        return [
            ShareItem(id=r[0], sharer_id=r[1], url_key=r[2], created_at=_dt(r[3]))
            for r in rows
        ]

    @staticmethod
    def feed_cursor(item: ShareItem) -> str:
        return f"{_ts(item.created_at)}~{item.id}"

    # -- redirect mappings (MappingStore protocol) -----------------------------------

    def put_mapping(
        self, original_key: str, target_key: str, now: float | None = None
    ) -> RedirectMapping:
        if original_key == target_key:
            raise InvalidMapping(f"self-mapping for {original_key!r}")
        now = time.time() if now is None else now
        with self.transaction() as conn:
            row = conn.execute(
                "SELECT created_at, last_requested_at FROM redirect_mappings WHERE original_key=?",
                (original_key,),
            ).fetchone()
            if row is None:
                conn.execute(
                    "INSERT INTO redirect_mappings VALUES (?,?,?,?)",
                    (original_key, target_key, now, now),
                )
                return RedirectMapping(original_key, target_key, now, now)
            created_at, last_requested = row
            last_requested = max(last_requested, now)
            conn.execute(
                "UPDATE redirect_mappings SET target_key=?, last_requested_at=? "
                "WHERE original_key=?",
                (target_key, last_requested, original_key),
            )
            return RedirectMapping(original_key, target_key, created_at, last_requested)

    def get_mappings(self, originals: Iterable[str], now: float | None = None) -> dict[str, str]:
        now = time.time() if now is None else now
        keys = list(originals)
        if not keys:
            return {}
        hits: dict[str, str] = {}
        with self.transaction() as conn:
            for key in keys:
                row = conn.execute(
                    "SELECT target_key, last_requested_at FROM redirect_mappings "
                    "WHERE original_key=?",
                    (key,),
                ).fetchone()
                if row is None:
                    continue
                hits[key] = row[0]
                conn.execute(
                    "UPDATE redirect_mappings SET last_requested_at=? WHERE original_key=?",
                    (max(row[1], now), key),
                )
        return hits

    def evict_mappings(self, now: float | None = None, ttl: float = 7 * 24 * 3600.0) -> int:
        if ttl <= 0:
            raise ValueError("ttl must be positive")
        now = time.time() if now is None else now
        with self.transaction() as conn:
            cur = conn.execute(
                "DELETE FROM redirect_mappings WHERE ? - last_requested_at > ?",
                (now, ttl),
            )
            return cur.rowcount

    # -- domain rate states ---------------------------------------------------------

    def save_domain_rate(self, state: DomainRateState) -> None:
        with self.transaction() as conn:
            conn.execute(
                "INSERT INTO domain_rates VALUES (?,?,?,?,?) "
                "ON CONFLICT(domain) DO UPDATE SET rate_per_sec=excluded.rate_per_sec, "
                "floor=excluded.floor, ceiling=excluded.ceiling, "
                "last_adjusted_at=excluded.last_adjusted_at",
                (
                    state.domain,
                    state.rate_per_sec,
                    state.floor,
                    state.ceiling,
                    state.last_adjusted_at,
                ),
            )

    def load_domain_rates(self) -> list[DomainRateState]:
        rows = self._conn.execute(
            "SELECT domain, rate_per_sec, floor, ceiling, last_adjusted_at FROM domain_rates"
        ).fetchall()
        return [
            DomainRateState(
                domain=r[0], rate_per_sec=r[1], floor=r[2], ceiling=r[3], last_adjusted_at=r[4]
            )
            for r in rows
        ]

    # -- export / import ---------------------------------------------------------------

    def export_records(self) -> Iterator[str]:
        """Everything except credentials/sessions, one JSON record per line."""
        for s in self.list_sources():
            yield json.dumps(
                {
                    "type": "source",
                    "id": s.id,
                    "username": s.username,
                    "displayName": s.display_name,
                    "createdAt": _ts(s.created_at),
                },
                sort_keys=True,
            )
        for rs in sorted(self.all_relation_sets(), key=lambda r: r.owner_id):
            yield json.dumps(
                {
                    "type": "relations",
                    "ownerId": rs.owner_id,
                    "trusted": sorted(rs.trusted),
                    "followed": sorted(rs.followed),
                },
                sort_keys=True,
            )
        rows = self._conn.execute(
            f"SELECT {self._ASSESSMENT_COLS}, live FROM assessments ORDER BY rowid_pk"
        ).fetchall()
        for row in rows:
            yield json.dumps(
                {
                    "type": "assessment",
                    "id": row[0],
                    "assessorId": row[1],
                    "urlKey": row[2],
                    "verdict": row[3],
                    "rationale": row[4],
                    "createdAt": row[5],
                    "updatedAt": row[6],
                    "live": bool(row[7]),
                },
                sort_keys=True,
            )
        q_rows = self._conn.execute("SELECT id FROM questions ORDER BY created_at, id").fetchall()
        for (qid,) in q_rows:
            row = self._conn.execute(
                "SELECT id, asker_id, url_key, body, anonymous, has_targets, created_at "
                "FROM questions WHERE id=?",
                (qid,),
            ).fetchone()
            q = self._question_from_row(row)
            yield json.dumps(
                {
                    "type": "question",
                    "id": q.id,
                    "askerId": q.asker_id,
                    "urlKey": q.url_key,
                    "body": q.body,
                    "anonymous": q.anonymous,
                    "targets": sorted(q.targets) if q.targets is not None else None,
                    "createdAt": _ts(q.created_at),
                },
                sort_keys=True,
            )
        share_rows = self._conn.execute(
            "SELECT id, sharer_id, url_key, created_at FROM shares ORDER BY created_at, id"
        ).fetchall()
        for row in share_rows:
            yield json.dumps(
                {
                    "type": "share",
                    "id": row[0],
                    "sharerId": row[1],
                    "urlKey": row[2],
                    "createdAt": row[3],
                },
                sort_keys=True,
            )
        mapping_rows = self._conn.execute(
            "SELECT original_key, target_key, created_at, last_requested_at "
            "FROM redirect_mappings ORDER BY original_key"
        ).fetchall()
        for row in mapping_rows:
            yield json.dumps(
                {
                    "type": "mapping",
                    "originalKey": row[0],
                    "targetKey": row[1],
                    "createdAt": row[2],
                    "lastRequestedAt": row[3],
                },
                sort_keys=True,
            )

    def import_records(self, lines: Iterable[str]) -> int:
        """Load records previously produced by :meth:`export_records`."""
        count = 0
        with self.transaction() as conn:
            for line in lines:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                kind = record["type"]
                if kind == "source":
                    conn.execute(
                        "INSERT INTO sources (id, username, display_name, created_at)"
                        " VALUES (?,?,?,?)",
                        (
                            record["id"],
                            record["username"],
                            record["displayName"],
                            record["createdAt"],
                        ),
                    )
                elif kind == "relations":
                    for other in record["trusted"]:
                        conn.execute(
                            "INSERT INTO relations VALUES (?,?,'trusted')",
                            (record["ownerId"], other),
                        )
                    for other in record["followed"]:
                        conn.execute(
                            "INSERT INTO relations VALUES (?,?,'followed')",
                            (record["ownerId"], other),
                        )
                elif kind == "assessment":
                    conn.execute(
                        "INSERT INTO assessments (id, assessor_id, url_key, verdict,"
                        " rationale, created_at, updated_at, live) VALUES (?,?,?,?,?,?,?,?)",
                        (
                            record["id"],
                            record["assessorId"],
                            record["urlKey"],
                            record["verdict"],
                            record["rationale"],
                            record["createdAt"],
                            record["updatedAt"],
                            int(record["live"]),
                        ),
                    )
                elif kind == "question":
                    conn.execute(
                        "INSERT INTO questions (id, asker_id, url_key, body, anonymous,"
                        " has_targets, created_at) VALUES (?,?,?,?,?,?,?)",
                        (
                            record["id"],
                            record["askerId"],
                            record["urlKey"],
                            record["body"],
                            int(record["anonymous"]),
                            int(record["targets"] is not None),
                            record["createdAt"],
                        ),
                    )
                    for target in record["targets"] or ():
                        conn.execute(
                            "INSERT INTO question_targets VALUES (?,?)",
                            (record["id"], target),
                        )
                elif kind == "share":
                    conn.execute(
                        "INSERT INTO shares VALUES (?,?,?,?)",
                        (
                            record["id"],
                            record["sharerId"],
                            record["urlKey"],
                            record["createdAt"],
                        ),
                    )
                elif kind == "mapping":
                    conn.execute(
                        "INSERT INTO redirect_mappings VALUES (?,?,?,?)",
                        (
                            record["originalKey"],
                            record["targetKey"],
                            record["createdAt"],
                            record["lastRequestedAt"],
                        ),
                    )
                else:
                    raise ValueError(f"unknown record type {kind!r}")
                count += 1
        return count
