"""Push a generated world into a running service through the public API.

Accounts are created via /v1/auth/signup with deterministic passwords
derived from the world seed (``<username>-seeded-<seed>``), so a seeded
instance can be logged into for manual poking around.
"""

from __future__ import annotations

import httpx

from trustnet.harness.worldgen import World


def seed_password(username: str, seed: int) -> str:
    return f"{username}-seeded-{seed}"


def seed_service(base_url: str, world: World, timeout: float = 10.0) -> dict:
    """Returns a summary dict with created counts and id mapping."""
    client = httpx.Client(base_url=base_url.rstrip("/"), timeout=timeout)
    id_map: dict[str, str] = {}  # world source id -> service source id
    tokens: dict[str, str] = {}
    created = existing = 0
    try:
        for source in world.sources:
            password = seed_password(source.username, world.seed)
            response = client.post(
                "/v1/auth/signup",
                json={
                    "username": source.username,
                    "password": password,
                    "displayName": source.display_name,
                },
            )
            if response.status_code == 201:
                created += 1
            elif response.status_code == 409:
                existing += 1  # already seeded; log in below
            else:
                response.raise_for_status()
            login = client.post(
                "/v1/auth/login",
                json={"username": source.username, "password": password},
            )
            login.raise_for_status()
            body = login.json()
            id_map[source.id] = body["source"]["id"]
            tokens[source.id] = body["token"]

        def headers(world_id: str) -> dict:
            return {"Authorization": f"Bearer {tokens[world_id]}"}

        for relations in world.relations:
            for kind, ids in (
                ("trusted", relations.trusted),
                ("followed", relations.followed),
            ):
                response = client.put(
                    f"/v1/relations/{kind}",
                    json={"sourceIds": sorted(id_map[i] for i in ids)},
                    headers=headers(relations.owner_id),
                )
                response.raise_for_status()

        for assessment in world.assessments:
            response = client.post(
                "/v1/assessments",
                json={
                    "url": assessment.url_key,
                    "verdict": assessment.verdict.value,
                    "rationale": assessment.rationale,
                },
                headers=headers(assessment.assessor_id),
            )
            response.raise_for_status()

        for question in world.questions:
            payload: dict = {
                "url": question.url_key,
                "body": question.body,
                "anonymous": question.anonymous,
            }
            if question.targets is not None:
                payload["targets"] = sorted(id_map[t] for t in question.targets)
            response = client.post(
                "/v1/questions", json=payload, headers=headers(question.asker_id)
            )
            response.raise_for_status()
    finally:
        client.close()
    return {
        "sourcesCreated": created,
        "sourcesExisting": existing,
        "relations": len(world.relations),
        "assessments": len(world.assessments),
        "questions": len(world.questions),
        "idMap": id_map,
    }
