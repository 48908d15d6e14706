"""Assembly of per-viewer wire views over a store snapshot.

Everything returned to a client passes through the visibility rules in
``trustnet.model``; these helpers only shape the results for JSON. Trust
edges and anonymous asker identities never appear in any output.
"""

from __future__ import annotations

from datetime import datetime
from typing import Sequence

from trustnet.model import (
    PageStatus,
    QuestionView,
    Source,
    VisibleAssessment,
    compute_page_status,
    link_statuses,
    recommend_sources,
    visible_assessments,
    visible_questions,
)
from trustnet.store import Store

RECOMMENDATION_LIMIT = 10


def _iso(dt: datetime) -> str:
    return dt.isoformat()


def source_view(source: Source) -> dict:
    return {
        "id": source.id,
        "username": source.username,
        "displayName": source.display_name,
    }


def assessment_view(item: VisibleAssessment) -> dict:
    a = item.assessment
    return {
        "id": a.id,
        "urlKey": a.url_key,
        "verdict": a.verdict.value,
        "rationale": a.rationale,
        "createdAt": _iso(a.created_at),
        "updatedAt": _iso(a.updated_at),
        "assessor": source_view(item.assessor),
        "relation": item.relation.value,
    }


def question_view(view: QuestionView, sources: dict[str, Source]) -> dict:
    asker = None
    if view.asker_id is not None and view.asker_id in sources:
        asker = source_view(sources[view.asker_id])
    return {
        "id": view.id,
        "urlKey": view.url_key,
        "body": view.body,
        "createdAt": _iso(view.created_at),
        "anonymous": view.anonymous,
        "asker": asker,
        "isOwn": view.is_own,
    }


def status_view(status: PageStatus) -> dict:
    return {
        "status": status.status.value,
        "basis": status.basis.value,
        "hasQuestions": status.has_questions,
    }


def page_view(store: Store, viewer_id: str, url_key: str, raw_url: str | None = None) -> dict:
    """Full pane payload for one URL: status, visible content, suggestions."""
    live = store.live_assessments(url_key)
    relations = store.relations_for(viewer_id)
    sources = store.sources_by_id()
    relations_by_owner = {rs.owner_id: rs for rs in store.all_relation_sets()}

    vis = visible_assessments(viewer_id, live, relations, sources)
    questions = visible_questions(viewer_id, store.questions_for(url_key), relations_by_owner)
    status = compute_page_status(
        viewer_id, url_key, live, relations, has_questions=bool(questions)
    )
    recommendations = recommend_sources(
        viewer_id, live, relations, store.trust_counts(), sources, RECOMMENDATION_LIMIT
    )
    return {
        "url": raw_url if raw_url is not None else url_key,
        "urlKey": url_key,
        **status_view(status),
        "assessments": [assessment_view(v) for v in vis],
        "questions": [question_view(q, sources) for q in questions],
        "recommendations": [
            {
                "source": source_view(sources[r.source_id]),
                "platformTrustCount": r.platform_trust_count,
            }
            for r in recommendations
        ],
    }


def link_status_views(store: Store, viewer_id: str, url_keys: Sequence[str]) -> dict[str, dict]:
    """Badge payload per canonical key (lighter than the pane view)."""
    relations = store.relations_for(viewer_id)
    assessments_by_key = store.live_assessments_many(url_keys)
    relations_by_owner = {rs.owner_id: rs for rs in store.all_relation_sets()}
    question_keys = {
        key
        for key in url_keys
        if visible_questions(viewer_id, store.questions_for(key), relations_by_owner)
    }
    statuses = link_statuses(
        viewer_id, url_keys, assessments_by_key, relations, question_keys
    )
    return {key: status_view(status) for key, status in statuses.items()}
