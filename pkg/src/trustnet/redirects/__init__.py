"""Redirect-chain following: classification, resolution, mapping cache, pacing."""

from trustnet.redirects.cache import InMemoryMappingCache, InvalidMapping, RedirectMapping
from trustnet.redirects.classify import (
    MalformedRedirect,
    RedirectKind,
    RedirectType,
    classify_redirect,
    resolve_google_news,
)
from trustnet.redirects.ratelimit import (
    Batch,
    DomainGovernor,
    DomainRateState,
    RateOutcome,
    adjust_rate,
    schedule_batches,
)
from trustnet.redirects.resolver import (
    DepthExceeded,
    FetchFailed,
    FetchResponse,
    HttpFetcher,
    LoopDetected,
    ResolutionResult,
    ResolveError,
    resolve,
)

__all__ = [
    "Batch",
    "DepthExceeded",
    "DomainGovernor",
    "DomainRateState",
    "FetchFailed",
    "FetchResponse",
    "HttpFetcher",
    "InMemoryMappingCache",
    "InvalidMapping",
    "LoopDetected",
    "MalformedRedirect",
    "RateOutcome",
    "RedirectKind",
    "RedirectMapping",
    "RedirectType",
    "ResolutionResult",
    "ResolveError",
    "adjust_rate",
    "classify_redirect",
    "resolve",
    "resolve_google_news",
    "schedule_batches",
]
