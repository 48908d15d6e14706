"""Follow a redirect chain to the final resource URL.

Each hop is fetched with a plain GET (bodies are needed for meta-refresh
and JS-special-case detection, so HEAD is not enough), classified, and
appended to the chain. Loop detection works on canonical URL keys so that
trivially-different spellings of the same hop are caught. Resolution
always terminates: a Terminal hop, a detected loop, the depth cap, or a
fetch failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping
from urllib.parse import urlsplit

import httpx

from trustnet import __version__
from trustnet.redirects.classify import RedirectKind, classify_redirect
from trustnet.redirects.ratelimit import DomainGovernor
from trustnet.urlcanon import PolicyTable, canonicalize

DEFAULT_MAX_DEPTH = 10  # maximum fetches per chain
DEFAULT_FETCH_TIMEOUT = 10.0  # seconds
BODY_CAP = 512 * 1024  # bytes read per response
USER_AGENT = f"trustnet-link-resolver/{__version__} (assessment status lookup)"


@dataclass(frozen=True)
class FetchResponse:
    status: int
    headers: Mapping[str, str]
    body: bytes


Fetcher = Callable[[str], FetchResponse]


class ResolveError(Exception):
    """Base class for chain resolution failures."""

    def __init__(self, message: str, chain: list[tuple[str, RedirectKind]]):
        super().__init__(message)
        self.chain = chain


class LoopDetected(ResolveError):
    pass


class DepthExceeded(ResolveError):
    pass


class FetchFailed(ResolveError):
    def __init__(self, message, chain, hop: int, url: str, cause: Exception):
        super().__init__(message, chain)
        self.hop = hop
        self.url = url
        self.cause = cause


@dataclass(frozen=True)
class ResolutionResult:
    final_url: str
    chain: tuple[tuple[str, RedirectKind], ...]
    hops: int

    def __post_init__(self) -> None:
        if self.hops != len(self.chain) - 1:
            raise ValueError("hops must equal chain length minus one")
        if not self.chain[-1][1].is_terminal:
            raise ValueError("chain must end in a terminal hop")


def domain_of(url: str) -> str:
    return (urlsplit(url).hostname or "").lower()


class HttpFetcher:
    """Real fetcher: GET with a fixed honest User-Agent, no auto-redirects."""

    def __init__(self, timeout: float = DEFAULT_FETCH_TIMEOUT, body_cap: int = BODY_CAP):
        self._client = httpx.Client(
            follow_redirects=False,
            timeout=timeout,
            headers={"User-Agent": USER_AGENT},
        )
        self._body_cap = body_cap

    def __call__(self, url: str) -> FetchResponse:
        with self._client.stream("GET", url) as response:
            body = b""
            for chunk in response.iter_bytes():
                body += chunk
                if len(body) >= self._body_cap:
                    body = body[: self._body_cap]
                    break
            return FetchResponse(
                status=response.status_code,
                headers=dict(response.headers),
                body=body,
            )

    def close(self) -> None:
        self._client.close()


def resolve(
    url: str,
    max_depth: int = DEFAULT_MAX_DEPTH,
    fetcher: Fetcher | None = None,
    governor: DomainGovernor | None = None,
    policy_table: PolicyTable | None = None,
) -> ResolutionResult:
    """Follow ``url`` until the hop that actually serves the resource.

    ``max_depth`` caps the number of fetches. Raises :class:`LoopDetected`
    when a hop's canonical key repeats, :class:`DepthExceeded` when the
    chain is still redirecting at the cap, and :class:`FetchFailed` on
    network errors (naming the failing hop). When a governor is given,
    each fetch first takes that domain's pacing slot and reports its
    outcome back.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if fetcher is None:
        fetcher = HttpFetcher()

    chain: list[tuple[str, RedirectKind]] = []
    seen_keys: set[str] = set()
    current = url
    while True:
        key = canonicalize(current, policy_table)
        if key in seen_keys:
            raise LoopDetected(f"redirect loop at {current}", chain)
        seen_keys.add(key)
        if len(chain) >= max_depth:
            raise DepthExceeded(f"still redirecting after {max_depth} fetches", chain)

        domain = domain_of(current)
        if governor is not None:
            governor.acquire(domain)
        try:
            response = fetcher(current)
        except Exception as exc:
            # Transport failures are neither successes nor rate limits; the
            # AIMD window only counts completed responses.
            raise FetchFailed(
                f"fetch of hop {len(chain)} ({current}) failed: {exc}",
                chain,
                hop=len(chain),
                url=current,
                cause=exc,
            ) from exc
        if governor is not None:
            governor.record_response(domain, response.status, response.headers)

        kind = classify_redirect(response.status, response.headers, response.body, current)
        chain.append((current, kind))
        if kind.is_terminal:
            return ResolutionResult(
                final_url=current, chain=tuple(chain), hops=len(chain) - 1
            )
        assert kind.target is not None
        current = kind.target
