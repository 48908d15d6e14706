"""Trustnet: trust-graph content assessment backend.

Stores user accuracy assessments bound to canonical URLs, computes
per-viewer accuracy statuses from each viewer's trusted and followed
sources, resolves and caches link-redirect chains, and serves the HTTP API
the browser extension talks to.
"""

__version__ = "0.1.0"
