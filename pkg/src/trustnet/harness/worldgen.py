"""Deterministic generation of self-consistent model snapshots ("worlds").

A world bundles sources, their relations, and the live assessments and
questions on a handful of URL keys. Regenerating from the same seed yields
a byte-identical world, so failing cases can be replayed by seed alone.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterator

from trustnet.model import Assessment, Question, RelationSet, Source, Verdict

_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

# All keys are canonical under the default policy table, so worlds can be
# pushed through the HTTP API without the edge canonicalizer changing them.
_URL_KEYS = (
    "https://news.example/story-1",
    "https://news.example/story-2",
    "https://www.youtube.com/watch?v=abc123",
)


@dataclass(frozen=True)
class World:
    """A complete serializable snapshot plus the seed that produced it."""

    seed: int
    sources: tuple[Source, ...]
    relations: tuple[RelationSet, ...]
    assessments: tuple[Assessment, ...]
    questions: tuple[Question, ...]

    @property
    def url_keys(self) -> tuple[str, ...]:
        keys = {a.url_key for a in self.assessments}
        keys.update(q.url_key for q in self.questions)
        return tuple(sorted(keys))

    def relations_for(self, owner_id: str) -> RelationSet:
        for rs in self.relations:
            if rs.owner_id == owner_id:
                return rs
        raise KeyError(owner_id)

    def to_json(self) -> str:
        doc = {
            "seed": self.seed,
            "sources": [
                {
                    "id": s.id,
                    "username": s.username,
                    "displayName": s.display_name,
                    "createdAt": s.created_at.isoformat(),
                }
                for s in self.sources
            ],
            "relations": [
                {
                    "ownerId": r.owner_id,
                    "trusted": sorted(r.trusted),
                    "followed": sorted(r.followed),
                }
                for r in self.relations
            ],
            "assessments": [
                {
                    "id": a.id,
                    "assessorId": a.assessor_id,
                    "urlKey": a.url_key,
                    "verdict": a.verdict.value,
                    "rationale": a.rationale,
                    "createdAt": a.created_at.isoformat(),
                    "updatedAt": a.updated_at.isoformat(),
                }
                for a in self.assessments
            ],
            "questions": [
                {
                    "id": q.id,
                    "askerId": q.asker_id,
                    "urlKey": q.url_key,
                    "body": q.body,
                    "anonymous": q.anonymous,
                    "targets": sorted(q.targets) if q.targets is not None else None,
                    "createdAt": q.created_at.isoformat(),
                }
                for q in self.questions
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "World":
        doc = json.loads(text)
        return cls(
            seed=doc["seed"],
            sources=tuple(
                Source(
                    id=s["id"],
                    username=s["username"],
                    display_name=s["displayName"],
                    created_at=datetime.fromisoformat(s["createdAt"]),
                )
                for s in doc["sources"]
            ),
            relations=tuple(
                RelationSet(
                    owner_id=r["ownerId"],
                    trusted=frozenset(r["trusted"]),
                    followed=frozenset(r["followed"]),
                )
                for r in doc["relations"]
            ),
            assessments=tuple(
                Assessment(
                    id=a["id"],
                    assessor_id=a["assessorId"],
                    url_key=a["urlKey"],
                    verdict=Verdict(a["verdict"]),
                    rationale=a["rationale"],
                    created_at=datetime.fromisoformat(a["createdAt"]),
                    updated_at=datetime.fromisoformat(a["updatedAt"]),
                )
                for a in doc["assessments"]
            ),
            questions=tuple(
                Question(
                    id=q["id"],
                    asker_id=q["askerId"],
                    url_key=q["urlKey"],
                    body=q["body"],
                    anonymous=q["anonymous"],
                    targets=(
                        frozenset(q["targets"]) if q["targets"] is not None else None
                    ),
                    created_at=datetime.fromisoformat(q["createdAt"]),
                )
                for q in doc["questions"]
            ),
        )


def gen_world(
    seed: int,
    max_sources: int = 8,
    max_assessments: int = 6,
    max_questions: int = 3,
) -> World:
    """Generate a random but internally consistent world from ``seed``."""
    rng = random.Random(seed)
    n_sources = rng.randint(2, max(2, max_sources))
    sources = tuple(
        Source(
            id=f"s{i}",
            username=f"user{i}",
            display_name=f"User {i}",
            created_at=_EPOCH + timedelta(days=i),
        )
        for i in range(n_sources)
    )
    ids = [s.id for s in sources]

    relations = []
    for owner in ids:
        others = [x for x in ids if x != owner]
        trusted = frozenset(x for x in others if rng.random() < 0.4)
        followed = frozenset(x for x in others if rng.random() < 0.4)
        relations.append(RelationSet(owner, trusted, followed))

    keys = list(_URL_KEYS[: rng.randint(1, len(_URL_KEYS))])
    pairs = [(sid, key) for sid in ids for key in keys]
    rng.shuffle(pairs)
    n_assessments = rng.randint(0, min(max_assessments, len(pairs)))
    assessments = []
    for i, (assessor, key) in enumerate(sorted(pairs[:n_assessments])):
        created = _EPOCH + timedelta(hours=i)
        assessments.append(
            Assessment(
                id=f"a{i}",
                assessor_id=assessor,
                url_key=key,
                verdict=rng.choice([Verdict.ACCURATE, Verdict.INACCURATE]),
                rationale=rng.choice([None, f"reasoning {i}"]),
                created_at=created,
                updated_at=created + timedelta(minutes=rng.randint(0, 90)),
            )
        )

    questions = []
    for i in range(rng.randint(0, max_questions)):
        asker = rng.choice(ids)
        others = [x for x in ids if x != asker]
        targets = None
        if others and rng.random() < 0.3:
            targets = frozenset(rng.sample(others, rng.randint(1, len(others))))
        questions.append(
            Question(
                id=f"q{i}",
                asker_id=asker,
                url_key=rng.choice(keys),
                body=rng.choice([None, f"is this right? ({i})"]),
                anonymous=rng.random() < 0.25,
                targets=targets,
                created_at=_EPOCH + timedelta(hours=100 + i),
            )
        )

    return World(
        seed=seed,
        sources=sources,
        relations=tuple(relations),
        assessments=tuple(assessments),
        questions=tuple(questions),
    )


def exhaustive_small_worlds(
    max_sources: int = 4, max_assessments: int = 3
) -> Iterator[tuple[World, str, str]]:
    """Every (world, viewer, url_key) case with <=4 sources, <=3 assessments.

    The viewer is always ``s0``; each other source independently takes one
    of the four relation states (none / trusted / followed / both) and each
    source independently has no assessment or one with either verdict, on a
    single url key. Worlds whose assessment count exceeds the cap are
    skipped.
    """
    key = "https://news.example/story-1"
    n_others = max_sources - 1
    sources = tuple(
        Source(
            id=f"s{i}",
            username=f"user{i}",
            display_name=f"User {i}",
            created_at=_EPOCH + timedelta(days=i),
        )
        for i in range(max_sources)
    )
    ids = [s.id for s in sources]
    rel_states = ("none", "trusted", "followed", "both")
    verdict_states = (None, Verdict.ACCURATE, Verdict.INACCURATE)

    def product(options, n):
        if n == 0:
            yield ()
            return
        for rest in product(options, n - 1):
            for opt in options:
                yield rest + (opt,)

    for rel_combo in product(rel_states, n_others):
        trusted = frozenset(
            ids[i + 1] for i, st in enumerate(rel_combo) if st in ("trusted", "both")
        )
        followed = frozenset(
            ids[i + 1] for i, st in enumerate(rel_combo) if st in ("followed", "both")
        )
        relations = (RelationSet("s0", trusted, followed),) + tuple(
            RelationSet(owner) for owner in ids[1:]
        )
        for verdict_combo in product(verdict_states, max_sources):
            verdicts = [
                (ids[i], v) for i, v in enumerate(verdict_combo) if v is not None
            ]
            if len(verdicts) > max_assessments:
                continue
            assessments = tuple(
                Assessment(
                    id=f"a{i}",
                    assessor_id=assessor,
                    url_key=key,
                    verdict=verdict,
                    created_at=_EPOCH + timedelta(hours=i),
                    updated_at=_EPOCH + timedelta(hours=i),
                )
                for i, (assessor, verdict) in enumerate(verdicts)
            )
            world = World(
                seed=0,
                sources=sources,
                relations=relations,
                assessments=assessments,
                questions=(),
            )
            yield world, "s0", key
