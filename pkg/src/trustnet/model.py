"""Pure domain logic: entities, relation semantics, per-viewer aggregation.

No I/O happens here. Functions take immutable snapshots (assessment lists,
relation sets, source maps) and derive what one viewer is allowed to see:

* a page's accuracy status, from the highest-priority non-empty assessor
  set (the viewer's own verdict, else their trusted sources, else their
  followed sources), unanimous verdicts winning and disagreement surfacing
  as a split opinion;
* which assessments and questions are visible to the viewer at all;
* which assessors of a page are worth recommending to follow.

Trust relationships are private to their owner. Nothing returned by this
module ever exposes another source's trusted set, and anonymous questions
never carry their asker's id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Mapping, Sequence


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


class NotFound(LookupError):
    """Raised when an entity referenced by id does not exist."""


class InvalidKey(ValueError):
    """Raised when a url key is not in canonical form."""


class Verdict(Enum):
    ACCURATE = "accurate"
    INACCURATE = "inaccurate"


class Status(Enum):
    ACCURATE = "accurate"
    INACCURATE = "inaccurate"
    SPLIT_OPINION = "split_opinion"
    NONE = "none"


class Basis(Enum):
    OWN = "own"
    TRUSTED = "trusted"
    FOLLOWED = "followed"
    NO_ASSESSMENT = "no_assessment"


class RelationTag(Enum):
    TRUSTED = "trusted"
    FOLLOWED = "followed"
    SELF = "self"


@dataclass(frozen=True)
class Source:
    id: str
    username: str
    display_name: str
    created_at: datetime


@dataclass(frozen=True)
class RelationSet:
    """One source's outgoing relations. ``trusted`` is private to the owner."""

    owner_id: str
    trusted: frozenset[str] = frozenset()
    followed: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.owner_id in self.trusted or self.owner_id in self.followed:
            raise ValueError("a source cannot trust or follow itself")


@dataclass(frozen=True)
class Assessment:
    id: str
    assessor_id: str
    url_key: str
    verdict: Verdict
    rationale: str | None = None
    created_at: datetime = field(default_factory=utcnow)
    updated_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if self.updated_at < self.created_at:
            raise ValueError("updated_at precedes created_at")


@dataclass(frozen=True)
class Question:
    id: str
    asker_id: str
    url_key: str
    body: str | None = None
    anonymous: bool = False
    targets: frozenset[str] | None = None
    created_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if self.targets is not None:
            if not self.targets:
                raise ValueError("explicit target set must be non-empty")
            if self.asker_id in self.targets:
                raise ValueError("a question cannot target its own asker")


@dataclass(frozen=True)
class PageStatus:
    status: Status
    has_questions: bool = False
    basis: Basis = Basis.NO_ASSESSMENT

    def __post_init__(self) -> None:
        if (self.basis is Basis.NO_ASSESSMENT) != (self.status is Status.NONE):
            raise ValueError("status None exactly when basis is NoAssessment")
        if self.basis is Basis.OWN and self.status not in (
            Status.ACCURATE,
            Status.INACCURATE,
        ):
            raise ValueError("own basis implies a definite verdict")


@dataclass(frozen=True)
class ShareItem:
    id: str
    sharer_id: str
    url_key: str
    created_at: datetime


@dataclass(frozen=True)
class SourceRecommendation:
    source_id: str
    platform_trust_count: int

    def __post_init__(self) -> None:
        if self.platform_trust_count < 0:
            raise ValueError("trust count cannot be negative")


@dataclass(frozen=True)
class VisibleAssessment:
    """An assessment the viewer may see, with the assessor's public info."""

    assessment: Assessment
    assessor: Source
    relation: RelationTag


@dataclass(frozen=True)
class QuestionView:
    """A question as shown to one viewer; the asker is hidden when anonymous."""

    id: str
    url_key: str
    body: str | None
    created_at: datetime
    anonymous: bool
    asker_id: str | None
    is_own: bool


def _aggregate(verdicts: Iterable[Verdict]) -> Status:
    seen = {v for v in verdicts}
    if seen == {Verdict.ACCURATE}:
        return Status.ACCURATE
    if seen == {Verdict.INACCURATE}:
        return Status.INACCURATE
    if seen:
        return Status.SPLIT_OPINION
    return Status.NONE


def compute_page_status(
    viewer_id: str,
    url_key: str,
    assessments: Sequence[Assessment],
    relations: RelationSet,
    *,
    has_questions: bool = False,
) -> PageStatus:
    """Derive the page status one viewer sees from the live assessments.

    Priority: the viewer's own assessment, else assessments from trusted
    sources, else from followed sources. Within the chosen set the status
    is the unanimous verdict, or split opinion on disagreement. The result
    is invariant under reordering of ``assessments``.

    ``has_questions`` is passed through; question visibility is a separate
    concern (see :func:`visible_questions`).
    """
    if relations.owner_id != viewer_id:
        raise ValueError("relations snapshot does not belong to the viewer")
    for a in assessments:
        if a.url_key != url_key:
            raise ValueError(f"assessment {a.id} is for a different url key")

    own = [a.verdict for a in assessments if a.assessor_id == viewer_id]
    if own:
        # At most one live own assessment exists; any verdict here is definite.
        return PageStatus(_aggregate(own), has_questions, Basis.OWN)

    trusted = [a.verdict for a in assessments if a.assessor_id in relations.trusted]
    if trusted:
        return PageStatus(_aggregate(trusted), has_questions, Basis.TRUSTED)

    followed = [a.verdict for a in assessments if a.assessor_id in relations.followed]
    if followed:
        return PageStatus(_aggregate(followed), has_questions, Basis.FOLLOWED)

    return PageStatus(Status.NONE, has_questions, Basis.NO_ASSESSMENT)


def relation_tag(viewer_id: str, source_id: str, relations: RelationSet) -> RelationTag | None:
    """How ``source_id`` relates to the viewer, or None for a stranger.

    A source that is both trusted and followed is tagged trusted: that is
    the set it is counted in during aggregation.
    """
    if source_id == viewer_id:
        return RelationTag.SELF
    if source_id in relations.trusted:
        return RelationTag.TRUSTED
    if source_id in relations.followed:
        return RelationTag.FOLLOWED
    return None


def visible_assessments(
    viewer_id: str,
    assessments: Sequence[Assessment],
    relations: RelationSet,
    sources: Mapping[str, Source],
) -> list[VisibleAssessment]:
    """The live assessments the viewer may see, newest first.

    Exactly those by the viewer or someone they trust or follow; strangers'
    assessments never appear. Assessments whose assessor no longer exists
    in ``sources`` are dropped.
    """
    if relations.owner_id != viewer_id:
        raise ValueError("relations snapshot does not belong to the viewer")
    items: list[VisibleAssessment] = []
    for a in assessments:
        tag = relation_tag(viewer_id, a.assessor_id, relations)
        if tag is None:
            continue
        assessor = sources.get(a.assessor_id)
        if assessor is None:
            continue
        items.append(VisibleAssessment(a, assessor, tag))
    items.sort(key=lambda v: (v.assessment.updated_at, v.assessment.id), reverse=True)
    return items


def visible_questions(
    viewer_id: str,
    questions: Sequence[Question],
    relations_by_owner: Mapping[str, RelationSet],
) -> list[QuestionView]:
    """The questions relayed to this viewer, newest first.

    A question reaches the viewer when it is untargeted and its asker
    trusts the viewer, when the viewer is an explicit target, or when the
    viewer asked it. Anonymous questions carry no asker id, even to the
    asker (``is_own`` still marks their own).
    """
    views: list[QuestionView] = []
    for q in questions:
        is_own = q.asker_id == viewer_id
        if q.targets is not None:
            visible = viewer_id in q.targets or is_own
        else:
            asker_relations = relations_by_owner.get(q.asker_id)
            visible = is_own or (
                asker_relations is not None and viewer_id in asker_relations.trusted
            )
        if not visible:
            continue
        views.append(
            QuestionView(
                id=q.id,
                url_key=q.url_key,
                body=q.body,
                created_at=q.created_at,
                anonymous=q.anonymous,
                asker_id=None if q.anonymous else q.asker_id,
                is_own=is_own,
            )
        )
    views.sort(key=lambda v: (v.created_at, v.id), reverse=True)
    return views


def platform_trust_counts(relation_sets: Iterable[RelationSet]) -> dict[str, int]:
    """Source id -> how many sources platform-wide trust it."""
    counts: dict[str, int] = {}
    for rs in relation_sets:
        for trusted_id in rs.trusted:
            counts[trusted_id] = counts.get(trusted_id, 0) + 1
    return counts


def recommend_sources(
    viewer_id: str,
    assessments: Sequence[Assessment],
    relations: RelationSet,
    trust_counts: Mapping[str, int],
    sources: Mapping[str, Source],
    limit: int = 10,
) -> list[SourceRecommendation]:
    """Assessors of the page the viewer might want to follow.

    Candidates are assessors the viewer neither trusts nor follows (and is
    not), ranked by how many sources platform-wide trust them; ties go to
    the older account, then ascending id. At most ``limit`` results.
    """
    if limit < 0:
        raise ValueError("limit must be non-negative")
    candidate_ids = {
        a.assessor_id
        for a in assessments
        if a.assessor_id != viewer_id
        and a.assessor_id not in relations.trusted
        and a.assessor_id not in relations.followed
    }
    candidates = [sources[sid] for sid in candidate_ids if sid in sources]
    candidates.sort(
        key=lambda s: (-trust_counts.get(s.id, 0), s.created_at, s.id)
    )
    return [
        SourceRecommendation(s.id, trust_counts.get(s.id, 0))
        for s in candidates[:limit]
    ]


def link_statuses(
    viewer_id: str,
    url_keys: Iterable[str],
    assessments_by_key: Mapping[str, Sequence[Assessment]],
    relations: RelationSet,
    question_keys: frozenset[str] | set[str] = frozenset(),
) -> dict[str, PageStatus]:
    """Page status per requested key, for badge rendering.

    ``question_keys`` holds the keys with at least one question visible to
    the viewer. Keys with nothing visible map to (None, hasQuestions=False).
    Semantics per key are identical to :func:`compute_page_status`.
    """
    out: dict[str, PageStatus] = {}
    for key in url_keys:
        out[key] = compute_page_status(
            viewer_id,
            key,
            assessments_by_key.get(key, ()),
            relations,
            has_questions=key in question_keys,
        )
    return out
