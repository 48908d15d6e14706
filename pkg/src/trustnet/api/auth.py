"""Password hashing and bearer-session management.

Passwords are hashed with scrypt (memory-hard, stdlib) under a per-user
random salt. Session tokens are 256-bit random bearer strings; only their
SHA-256 is stored, so a leaked database does not leak usable tokens.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import secrets
import time

from trustnet.store import Store

TOKEN_TTL = 30 * 24 * 3600.0  # seconds

_SCRYPT_PARAMS = {"n": 2**14, "r": 8, "p": 1}


def hash_password(password: str, salt: bytes | None = None) -> tuple[bytes, bytes, str]:
    """Returns (salt, hash, params-json)."""
    salt = salt if salt is not None else secrets.token_bytes(16)
    digest = hashlib.scrypt(password.encode("utf-8"), salt=salt, **_SCRYPT_PARAMS)
    return salt, digest, json.dumps(_SCRYPT_PARAMS, sort_keys=True)


def verify_password(password: str, salt: bytes, expected: bytes, params: str) -> bool:
    kwargs = json.loads(params)
    digest = hashlib.scrypt(password.encode("utf-8"), salt=salt, **kwargs)
    return hmac.compare_digest(digest, expected)


def new_token() -> str:
    return secrets.token_urlsafe(32)


def token_hash(token: str) -> str:
    return hashlib.sha256(token.encode("ascii")).hexdigest()


def issue_session(store: Store, source_id: str, now: float | None = None) -> tuple[str, float]:
    """Create a session; returns (bearer token, expiry epoch seconds)."""
    now = time.time() if now is None else now
    token = new_token()
    expires_at = now + TOKEN_TTL
    store.create_session(token_hash(token), source_id, expires_at)
    return token, expires_at


def authenticate(store: Store, token: str, now: float | None = None) -> str | None:
    """Source id for a live token, None for unknown or expired ones."""
    now = time.time() if now is None else now
    session = store.get_session(token_hash(token))
    if session is None:
        return None
    source_id, expires_at = session
    if expires_at <= now:
        return None
    return source_id
