"""Brute-force status oracle for differential testing.

This deliberately reimplements per-viewer aggregation from first
principles over a whole world snapshot, sharing no code with the
production path in ``trustnet.model``. It returns plain strings so that
agreement checks compare raw values, not shared enum objects.

Rule, restated independently: gather the viewer's own verdicts, the
verdicts of sources the viewer trusts, and the verdicts of sources the
viewer follows, each as its own multiset. The first non-empty multiset in
that order governs. If it holds only "accurate" the page is accurate, only
"inaccurate" inaccurate, both a split opinion. With all three empty there
is no status.
"""

from __future__ import annotations

from trustnet.harness.worldgen import World


def oracle_status(viewer_id: str, url_key: str, world: World) -> tuple[str, str]:
    """Return ``(status, basis)`` as plain strings.

    status: accurate | inaccurate | split_opinion | none
    basis:  own | trusted | followed | no_assessment
    """
    trusted_ids: set[str] = set()
    followed_ids: set[str] = set()
    for rs in world.relations:
        if rs.owner_id == viewer_id:
            trusted_ids = set(rs.trusted)
            followed_ids = set(rs.followed)

    own: list[str] = []
    from_trusted: list[str] = []
    from_followed: list[str] = []
    for a in world.assessments:
        if a.url_key != url_key:
            continue
        if a.assessor_id == viewer_id:
            own.append(a.verdict.value)
        if a.assessor_id in trusted_ids:
            from_trusted.append(a.verdict.value)
        if a.assessor_id in followed_ids:
            from_followed.append(a.verdict.value)

    for verdicts, basis in ((own, "own"), (from_trusted, "trusted"), (from_followed, "followed")):
        if not verdicts:
            continue
        if all(v == "accurate" for v in verdicts):
            return "accurate", basis
        if all(v == "inaccurate" for v in verdicts):
            return "inaccurate", basis
        return "split_opinion", basis
    return "none", "no_assessment"
