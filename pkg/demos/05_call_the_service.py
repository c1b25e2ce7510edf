"""Drive the HTTP evaluation service in-process.

The service wraps the same evaluation pipeline behind a small job-queue API:
POST /api/v1/evaluate enqueues an episode, GET /api/v1/jobs/{id} polls it,
and GET /api/v1/jobs/{id}/record.json downloads the canonical record — byte
for byte the same file the batch runner would write. This demo uses an
in-process test client; `policydag serve` runs the same app under uvicorn.

Run with: python3 demos/05_call_the_service.py
"""

import time

from fastapi.testclient import TestClient

from policydag import RunConfig, default_vocabulary
from policydag.service import create_app

app = create_app(
    vocab=default_vocabulary(),
    profiles={"default": RunConfig(max_depth=2, max_branch=2, random_seed=42)},
    seed=42,
)

with TestClient(app) as client:
    indicators = client.get("/api/v1/indicators").json()
    print(f"vocabulary: {len(indicators['indicators'])} indicators "
          f"(version {indicators['version']})")

    job = client.post("/api/v1/evaluate", json={
        "episode_id": "demo",
        "description": "A four-day work week is mandated for public employers",
        "government_focus": ["labor_participation"],
        "relevance_set": ["labor_participation", "household_income", "gdp_growth"],
    }).json()
    print(f"job {job['job_id']} -> {job['state']}")

    while job["state"] not in ("done", "failed"):
        time.sleep(0.05)
        job = client.get(f"/api/v1/jobs/{job['job_id']}").json()

    record = job["result"]
    print(f"job finished: status={record['status']}, "
          f"{len(record['dag']['nodes'])} DAG nodes, metrics={record['metrics']}")

    download = client.get(f"/api/v1/jobs/{job['job_id']}/record.json")
    print(f"record.json download: {len(download.content)} bytes, "
          f"{download.headers['content-disposition']}")
