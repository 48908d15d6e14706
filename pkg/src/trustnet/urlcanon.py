"""URL cleaning and canonicalization.

Every resource is stored and looked up under one canonical key, so all the
URL variations that point at the same resource (trailing slash, index.html,
http vs https, tracking parameters, parameter order, aliased hosts) must
collapse to a single string.

The rules, in the order they are applied by :func:`canonicalize`:

1. host lowercased, userinfo dropped, default port dropped
2. host alias table applied (at most once, e.g. bbc.co.uk -> bbc.com)
3. scheme folded to https (http and https serve the same resource)
4. fragment dropped
5. trailing "/" and trailing "/index.html" stripped from the path
6. percent-escapes normalized to uppercase hex
7. query parameters dropped unless a per-site policy keeps them; kept
   parameters are sorted by name

Per-site policies exist because a few sites identify resources through query
parameters (YouTube's watch?v=, Hacker News item?id=, Facebook media) while
for everything else parameters are overwhelmingly tracking noise (fbclid,
utm_*, gclid). Default-drop with allowlists is safer than enumerating
trackers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from urllib.parse import parse_qsl, urlencode, urljoin, urlsplit, urlunsplit

UrlKey = str

_FETCHABLE_SCHEMES = ("http", "https")
_DEFAULT_PORTS = {"http": 80, "https": 443}
_PCT_RE = re.compile(r"%([0-9a-fA-F]{2})")
_INDEX_SUFFIX = "/index.html"


class InvalidHref(ValueError):
    """Raised when an href cannot be turned into a fetchable absolute URL."""


class UnsupportedScheme(ValueError):
    """Raised when a URL's scheme is not http or https."""


class ConfigError(ValueError):
    """Raised on malformed policy/alias config, with line diagnostics."""


class PolicyMode(Enum):
    KEEP_LISTED = "keep_listed"
    DROP_ALL = "drop_all"


@dataclass(frozen=True)
class ParamPolicy:
    """Which query parameters to keep for URLs matching a host (+path) pattern.

    ``host`` matches the host itself and any subdomain. ``path_prefix``
    restricts the policy to paths equal to the prefix or below it (segment
    boundary); empty means any path.
    """

    host: str
    kept_params: frozenset[str]
    mode: PolicyMode = PolicyMode.KEEP_LISTED
    path_prefix: str = ""

    def __post_init__(self) -> None:
        if self.mode is PolicyMode.KEEP_LISTED and not self.kept_params:
            raise ValueError(f"KeepListed policy for {self.pattern!r} has no params")

    @property
    def pattern(self) -> str:
        return self.host + self.path_prefix

    def matches(self, host: str, path: str) -> bool:
        if host != self.host and not host.endswith("." + self.host):
            return False
        if not self.path_prefix:
            return True
        return path == self.path_prefix or path.startswith(self.path_prefix + "/")


@dataclass(frozen=True)
class HostAlias:
    """Rewrite of one host (and its subdomains) to another, applied once."""

    from_host: str
    to_host: str


class PolicyTable:
    """Immutable set of param policies plus host aliases.

    Lookups are pure; a config reload builds a fresh table and the caller
    swaps the reference, so concurrent readers never see a partial update.
    """

    def __init__(
        self,
        policies: tuple[ParamPolicy, ...] = (),
        aliases: tuple[HostAlias, ...] = (),
    ) -> None:
        patterns = [p.pattern for p in policies]
        if len(set(patterns)) != len(patterns):
            dup = sorted({p for p in patterns if patterns.count(p) > 1})
            raise ConfigError(f"duplicate policy pattern(s): {', '.join(dup)}")
        froms = [a.from_host for a in aliases]
        if len(set(froms)) != len(froms):
            raise ConfigError("duplicate alias source host")
        _check_alias_acyclic(aliases)
        # Most specific first: longer path prefix, then longer host.
        self.policies = tuple(
            sorted(policies, key=lambda p: (-len(p.path_prefix), -len(p.host)))
        )
        self.aliases = {a.from_host: a.to_host for a in aliases}

    def lookup(self, host: str, path: str = "") -> ParamPolicy:
        """Return the most specific matching policy, or the drop-all default."""
        host = host.lower()
        for policy in self.policies:
            if policy.matches(host, path):
                return policy
        return _DROP_ALL_DEFAULT

    def apply_alias(self, host: str) -> str:
        """Rewrite ``host`` through the alias table, at most once."""
        for from_host, to_host in self.aliases.items():
            if host == from_host:
                return to_host
            if host.endswith("." + from_host):
                return host[: -len(from_host)] + to_host
        return host

    def merged_with(self, other: "PolicyTable") -> "PolicyTable":
        """New table where ``other``'s entries override same-pattern entries."""
        policies = {p.pattern: p for p in self.policies}
        policies.update({p.pattern: p for p in other.policies})
        aliases = dict(self.aliases)
        aliases.update(other.aliases)
        return PolicyTable(
            tuple(policies.values()),
            tuple(HostAlias(f, t) for f, t in aliases.items()),
        )


_DROP_ALL_DEFAULT = ParamPolicy(
    host="", kept_params=frozenset(), mode=PolicyMode.DROP_ALL
)


def _check_alias_acyclic(aliases: tuple[HostAlias, ...]) -> None:
    mapping = {a.from_host: a.to_host for a in aliases}
    for start in mapping:
        seen = {start}
        cur = mapping[start]
        while cur in mapping:
            if cur in seen:
                raise ConfigError(f"alias cycle involving {cur!r}")
            seen.add(cur)
            cur = mapping[cur]


# Built-in policies for the sites known to identify resources via query
# params. Facebook keeps media/comment identifiers only on media paths;
# plain posts fall through to drop-all.
_BUILTIN_CONFIG = """\
keep youtube.com v
keep youtu.be v
keep news.ycombinator.com id
keep facebook.com/photo fbid,set,id
keep facebook.com/photo.php fbid,set,id
keep facebook.com/photos fbid,set,id
keep facebook.com/video.php v,id
keep facebook.com/watch v,id
keep facebook.com/story.php story_fbid,id,comment_id
keep facebook.com/permalink.php story_fbid,id,comment_id
"""


def parse_policy_config(text: str, source: str = "<config>") -> PolicyTable:
    """Parse line-oriented policy config.

    Grammar, one directive per line (``#`` starts a comment)::

        keep <host[/path-prefix]> <param,param,...>
        alias <from-host> <to-host>
    """
    policies: list[ParamPolicy] = []
    aliases: list[HostAlias] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "keep":
            if len(fields) != 3:
                raise ConfigError(
                    f"{source}:{lineno}: expected 'keep <host> <params>', got {raw!r}"
                )
            pattern, params_field = fields[1], fields[2]
            host, slash, prefix = pattern.partition("/")
            params = frozenset(p for p in params_field.split(",") if p)
            if not host or not params:
                raise ConfigError(f"{source}:{lineno}: empty host or param list")
            try:
                policies.append(
                    ParamPolicy(
                        host=host.lower(),
                        kept_params=params,
                        path_prefix=(slash + prefix) if slash else "",
                    )
                )
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {exc}") from exc
        elif fields[0] == "alias":
            if len(fields) != 3:
                raise ConfigError(
                    f"{source}:{lineno}: expected 'alias <from> <to>', got {raw!r}"
                )
            aliases.append(HostAlias(fields[1].lower(), fields[2].lower()))
        else:
            raise ConfigError(f"{source}:{lineno}: unknown directive {fields[0]!r}")
    try:
        return PolicyTable(tuple(policies), tuple(aliases))
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def default_policy_table() -> PolicyTable:
    """The table of built-in per-site policies (no aliases)."""
    return parse_policy_config(_BUILTIN_CONFIG, source="<builtin>")


def load_policy_table(path: str | Path) -> PolicyTable:
    """Built-ins merged with the config file at ``path`` (file wins)."""
    text = Path(path).read_text(encoding="utf-8")
    return default_policy_table().merged_with(
        parse_policy_config(text, source=str(path))
    )


def default_param_policies() -> list[ParamPolicy]:
    return list(default_policy_table().policies)


def clean(raw_href: str, base_url: str) -> str:
    """Resolve an href as found in a page into an absolute http(s) URL.

    Handles relative paths, protocol-relative ``//host/p`` and schemeless
    hrefs by resolving against ``base_url``; strips surrounding whitespace.
    Raises :class:`InvalidHref` for anything that cannot be fetched
    (javascript:, mailto:, data:, fragments-only, malformed).
    """
    base = base_url.strip()
    href = raw_href.strip()
    if not href:
        raise InvalidHref("empty href")
    base_parts = urlsplit(base)
    if base_parts.scheme not in _FETCHABLE_SCHEMES or not base_parts.netloc:
        raise InvalidHref(f"base URL is not absolute http(s): {base_url!r}")
    try:
        resolved = urljoin(base, href)
        parts = urlsplit(resolved)
    except ValueError as exc:
        raise InvalidHref(f"unparseable href {raw_href!r}: {exc}") from exc
    if parts.scheme not in _FETCHABLE_SCHEMES:
        raise InvalidHref(f"non-fetchable scheme {parts.scheme!r} in {raw_href!r}")
    if not parts.netloc or " " in parts.netloc:
        raise InvalidHref(f"missing or malformed host in {raw_href!r}")
    return resolved


def canonicalize(url: str, table: PolicyTable | None = None) -> UrlKey:
    """Map an absolute http(s) URL to its canonical key.

    Idempotent: ``canonicalize(canonicalize(u)) == canonicalize(u)``.
    Raises :class:`UnsupportedScheme` for non-http(s) input and
    :class:`InvalidHref` if the URL has no host.
    """
    if table is None:
        table = default_policy_table()
    try:
        parts = urlsplit(url.strip())
    except ValueError as exc:
        raise InvalidHref(f"unparseable URL {url!r}: {exc}") from exc
    if parts.scheme not in _FETCHABLE_SCHEMES:
        raise UnsupportedScheme(f"cannot canonicalize scheme {parts.scheme!r}")
    host = parts.hostname
    if not host:
        raise InvalidHref(f"URL has no host: {url!r}")

    try:
        port = parts.port
    except ValueError as exc:
        raise InvalidHref(f"invalid port in {url!r}: {exc}") from exc
    # Default for the original scheme, or 443: the key's scheme is always
    # https, so a surviving :443 would not round-trip.
    if port == _DEFAULT_PORTS[parts.scheme] or port == _DEFAULT_PORTS["https"]:
        port = None
    host = table.apply_alias(host)
    if ":" in host:  # bare IPv6 from .hostname; re-bracket
        host = f"[{host}]"
    netloc = host if port is None else f"{host}:{port}"

    path = _normalize_pct(parts.path)
    while True:
        before = path
        path = path.rstrip("/")
        if path.endswith(_INDEX_SUFFIX):
            path = path[: -len(_INDEX_SUFFIX)]
        if path == before:
            break

    policy = table.lookup(host, path)
    query = ""
    if parts.query and policy.mode is PolicyMode.KEEP_LISTED:
        pairs = [
            (k, v)
            for k, v in parse_qsl(parts.query, keep_blank_values=True)
            if k in policy.kept_params
        ]
        pairs.sort(key=lambda kv: kv[0])  # stable: same-name order preserved
        query = urlencode(pairs)

    return urlunsplit(("https", netloc, path, query, ""))


def _normalize_pct(text: str) -> str:
    return _PCT_RE.sub(lambda m: "%" + m.group(1).upper(), text)
