"""Classify a fetched response as a redirect hop or a terminal resource.

Redirects come in three shapes we can act on without executing page
scripts: HTTP 3xx with a Location header, an HTML ``<meta
http-equiv="refresh">`` element, and a small registry of host-specific
extractors for sites that redirect from JavaScript (Google News being the
known case: the wrapper page carries the publisher URL in its markup).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from html.parser import HTMLParser
from typing import Callable, Mapping
from urllib.parse import urlsplit

from trustnet.urlcanon import InvalidHref, clean


class MalformedRedirect(ValueError):
    """A 3xx response without a usable Location header."""


class RedirectType(Enum):
    HTTP_3XX = "http_3xx"
    META_REFRESH = "meta_refresh"
    JS_SPECIAL_CASE = "js_special_case"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class RedirectKind:
    type: RedirectType
    target: str | None = None

    def __post_init__(self) -> None:
        if self.type is RedirectType.TERMINAL:
            if self.target is not None:
                raise ValueError("terminal carries no target")
        elif not self.target:
            raise ValueError(f"{self.type.value} requires a target URL")

    @property
    def is_terminal(self) -> bool:
        return self.type is RedirectType.TERMINAL


_META_URL_RE = re.compile(r"^\s*[\d.]*\s*[;,]\s*url\s*=\s*(['\"]?)(.+?)\1\s*$", re.IGNORECASE)


class _MetaRefreshParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.refresh_content: str | None = None

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)

    def handle_starttag(self, tag, attrs):
        if tag != "meta" or self.refresh_content is not None:
            return
        attr_map = {k.lower(): (v or "") for k, v in attrs}
        if attr_map.get("http-equiv", "").lower() == "refresh":
            self.refresh_content = attr_map.get("content", "")


def _decode(body: bytes) -> str:
    return body.decode("utf-8", errors="replace")


def find_meta_refresh(body: bytes, current_url: str) -> str | None:
    """Target of the first meta refresh in ``body``, resolved absolute."""
    parser = _MetaRefreshParser()
    try:
        parser.feed(_decode(body))
    except Exception:
        return None
    if parser.refresh_content is None:
        return None
    match = _META_URL_RE.match(parser.refresh_content)
    if not match:
        return None
    try:
        return clean(match.group(2), current_url)
    except InvalidHref:
        return None


_GOOGLE_NEWS_ATTRS = ("data-n-au", "data-url", "href")


class _ExternalLinkParser(HTMLParser):
    """Collect the first absolute non-Google URL in link-ish attributes."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.found: str | None = None

    def handle_startendtag(self, tag, attrs):
        self.handle_starttag(tag, attrs)

    def handle_starttag(self, tag, attrs):
        if self.found is not None:
            return
        attr_map = {k.lower(): v for k, v in attrs}
        for name in _GOOGLE_NEWS_ATTRS:
            candidate = attr_map.get(name)
            if not candidate:
                continue
            parts = urlsplit(candidate)
            if parts.scheme not in ("http", "https") or not parts.hostname:
                continue
            host = parts.hostname
            if host.startswith("google.") or ".google." in host or host == "google.com":
                continue
            self.found = candidate
            return


def is_google_news_host(url: str) -> bool:
    host = urlsplit(url).hostname or ""
    return host == "news.google.com" or host.startswith("news.google.")


def resolve_google_news(url: str, body: bytes) -> str | None:
    """Extract the publisher URL from a Google News wrapper page.

    Google News redirects from script, so the chain cannot be followed via
    status codes; the publisher link is instead scraped from anchors and
    data attributes of the returned document. Best effort: returns None
    when no external target is present. The caller must pass a Google News
    URL; anything else is a programming error.
    """
    if not is_google_news_host(url):
        raise ValueError(f"not a Google News URL: {url!r}")
    parser = _ExternalLinkParser()
    try:
        parser.feed(_decode(body))
    except Exception:
        return None
    return parser.found


# Host-specific extractors for JS redirects, keyed by a host predicate.
JsExtractor = Callable[[str, bytes], "str | None"]
_JS_EXTRACTORS: list[tuple[Callable[[str], bool], JsExtractor]] = [
    (is_google_news_host, resolve_google_news),
]


def register_js_extractor(host_predicate: Callable[[str], bool], extractor: JsExtractor) -> None:
    _JS_EXTRACTORS.append((host_predicate, extractor))


def classify_redirect(
    http_status: int,
    headers: Mapping[str, str],
    body: bytes | None,
    current_url: str,
) -> RedirectKind:
    """Decide what a completed fetch of ``current_url`` was.

    Precedence: a 3xx Location redirect, then a meta refresh in the body,
    then a registered JS special-case extractor for the URL's host; plain
    content is terminal. Relative targets are resolved against
    ``current_url``. A 3xx without a usable Location raises
    :class:`MalformedRedirect`.
    """
    lower_headers = {k.lower(): v for k, v in headers.items()}
    if 300 <= http_status < 400:
        location = lower_headers.get("location")
        if not location:
            raise MalformedRedirect(f"{http_status} response without Location")
        try:
            target = clean(location, current_url)
        except InvalidHref as exc:
            raise MalformedRedirect(f"unusable Location {location!r}: {exc}") from exc
        return RedirectKind(RedirectType.HTTP_3XX, target)

    if body:
        target = find_meta_refresh(body, current_url)
        if target is not None:
            return RedirectKind(RedirectType.META_REFRESH, target)
        for predicate, extractor in _JS_EXTRACTORS:
            if predicate(current_url):
                extracted = extractor(current_url, body)
                if extracted:
                    try:
                        extracted = clean(extracted, current_url)
                    except InvalidHref:
                        continue
                    return RedirectKind(RedirectType.JS_SPECIAL_CASE, extracted)

    return RedirectKind(RedirectType.TERMINAL)
