from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from trustnet.model import Assessment, Question, Source, Verdict

EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)


def mk_source(sid: str, created_days: int = 0) -> Source:
    return Source(
        id=sid,
        username=f"user-{sid}",
        display_name=f"User {sid}",
        created_at=EPOCH + timedelta(days=created_days),
    )


def mk_assessment(
    assessor: str,
    verdict: Verdict,
    url_key: str = "https://news.example/story",
    hours: int = 0,
    aid: str | None = None,
    rationale: str | None = None,
) -> Assessment:
    ts = EPOCH + timedelta(hours=hours)
    return Assessment(
        id=aid or f"a-{assessor}-{hours}",
        assessor_id=assessor,
        url_key=url_key,
        verdict=verdict,
        rationale=rationale,
        created_at=ts,
        updated_at=ts,
    )


def mk_question(
    asker: str,
    url_key: str = "https://news.example/story",
    anonymous: bool = False,
    targets: frozenset[str] | None = None,
    qid: str | None = None,
    hours: int = 0,
) -> Question:
    return Question(
        id=qid or f"q-{asker}-{hours}",
        asker_id=asker,
        url_key=url_key,
        body="is this accurate?",
        anonymous=anonymous,
        targets=targets,
        created_at=EPOCH + timedelta(hours=hours),
    )


@pytest.fixture
def sources() -> dict[str, Source]:
    return {sid: mk_source(sid, created_days=i) for i, sid in enumerate("VABCX")}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """One visible pass/fail line per acceptance criterion (run with -s)."""
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.fspath.basename == "test_acceptance.py":
        word = "PASS" if report.passed else "FAIL"
        print(f"\n[ACCEPTANCE] {item.name}: {word}")
