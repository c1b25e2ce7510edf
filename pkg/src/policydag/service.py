"""HTTP service for single-episode evaluation, backing the analyst UI.

Evaluation runs off the request path on a bounded worker pool; clients poll
the job resource until it reaches a terminal state.
"""

from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response
from pydantic import BaseModel

from .backend import BackendProfile, make_backend
from .model import (
    EpisodeRecord,
    IndicatorVocabulary,
    PolicyEpisode,
    RunConfig,
    load_vocabulary,
    record_to_dict,
    serialize_record,
    validate_episode,
)
from .pipeline import evaluate_episode, fixed_clock

MAX_QUEUED_JOBS = 64


class EvaluationRequest(BaseModel):
    description: str = ""
    context: dict[str, str] = {}
    government_focus: list[str] = []
    relevance_set: list[str] = []
    episode_id: str = "adhoc"
    profile: str | None = None
    config: dict[str, Any] | None = None  # inline RunConfig overrides


@dataclass
class Job:
    job_id: str
    state: str = "queued"  # queued | running | done | failed
    record: EpisodeRecord | None = None
    failure: str = ""


@dataclass
class JobStore:
    lock: threading.Lock = field(default_factory=threading.Lock)
    jobs: dict[str, Job] = field(default_factory=dict)

    def create(self) -> Job:
        job = Job(job_id=uuid.uuid4().hex)
        with self.lock:
            self.jobs[job.job_id] = job
        return job

    def get(self, job_id: str) -> Job | None:
        with self.lock:
            return self.jobs.get(job_id)

    def queued_count(self) -> int:
        with self.lock:
            return sum(1 for j in self.jobs.values() if j.state in ("queued", "running"))

    def transition(self, job_id: str, state: str, record: EpisodeRecord | None = None,
                   failure: str = "") -> None:
        with self.lock:
            job = self.jobs[job_id]
            if job.state in ("done", "failed"):
                return  # terminal states are immutable
            job.state = state
            job.record = record
            job.failure = failure


def load_profiles(profile_dir: Path) -> dict[str, RunConfig]:
    profiles = {}
    for path in sorted(profile_dir.glob("*.json")):
        with open(path, encoding="utf-8") as fh:
            profiles[path.stem] = RunConfig(**json.load(fh))
    return profiles


def _job_payload(job: Job) -> dict[str, Any]:
    payload: dict[str, Any] = {"job_id": job.job_id, "state": job.state}
    if job.state == "done" and job.record is not None:
        payload["result"] = record_to_dict(job.record)
    if job.state == "failed":
        payload["failure"] = job.failure
    return payload


def create_app(
    vocab: IndicatorVocabulary,
    profiles: dict[str, RunConfig] | None = None,
    backend_kind: str = "stub",
    seed: int = 0,
    concurrency: int = 2,
    static_dir: Path | None = None,
    api_key: str | None = None,
) -> FastAPI:
    app = FastAPI(title="policydag")
    store = JobStore()
    pool = ThreadPoolExecutor(max_workers=max(1, concurrency))
    profiles = profiles or {}
    default_config = profiles.get("default", RunConfig(random_seed=seed if backend_kind == "stub" else None))

    def resolve_config(request: EvaluationRequest) -> RunConfig:
        base = default_config
        if request.profile is not None:
            if request.profile not in profiles:
                raise HTTPException(status_code=400, detail=[f"unknown profile: {request.profile}"])
            base = profiles[request.profile]
        if request.config:
            from .model import config_to_dict

            merged = {**config_to_dict(base), **request.config}
            try:
                return RunConfig(**merged)
            except (TypeError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=[f"invalid config override: {exc}"])
        return base

    def run_job(job: Job, episode: PolicyEpisode, config: RunConfig) -> None:
        store.transition(job.job_id, "running")
        try:
            profile = BackendProfile(
                kind=backend_kind,
                endpoint=config.api_endpoint,
                model_name=config.model_name,
                api_key_ref=config.api_key_ref,
                retry_limit=config.retry_limit,
                seed=config.random_seed if config.random_seed is not None else seed,
            )
            backend = make_backend(profile, api_key=api_key)
            clock = fixed_clock if backend_kind == "stub" else __import__("time").time
            record = evaluate_episode(episode, vocab, config, backend, clock)
        except Exception as exc:  # job isolation: failures land on the handle
            store.transition(job.job_id, "failed", failure=str(exc))
            return
        store.transition(job.job_id, "done", record=record)

    @app.post("/api/v1/evaluate")
    def evaluate(request: EvaluationRequest) -> dict[str, Any]:
        episode = PolicyEpisode(
            episode_id=request.episode_id or "adhoc",
            description=request.description,
            context=dict(request.context),
            government_focus=frozenset(request.government_focus),
            relevance_set=frozenset(request.relevance_set),
        )
        violations = validate_episode(episode, vocab)
        if violations:
            raise HTTPException(status_code=400, detail=violations)
        config = resolve_config(request)
        if store.queued_count() >= MAX_QUEUED_JOBS:
            raise HTTPException(status_code=429, detail=["job queue is full"])
        job = store.create()
        pool.submit(run_job, job, episode, config)
        return _job_payload(store.get(job.job_id))

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str) -> dict[str, Any]:
        job = store.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=["unknown job"])
        return _job_payload(job)

    @app.get("/api/v1/indicators")
    def indicators() -> dict[str, Any]:
        return {
            "version": vocab.version,
            "indicators": [
                {"id": ind.id, "name": ind.name, "definition": ind.definition}
                for ind in vocab.indicators
            ],
        }

    @app.get("/api/v1/jobs/{job_id}/record.json")
    def download_record(job_id: str) -> Response:
        job = store.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=["unknown job"])
        if job.state != "done" or job.record is None:
            raise HTTPException(status_code=409, detail=[f"job is {job.state}, not done"])
        body = serialize_record(job.record)
        filename = f"{job.record.episode_id}.json"
        return Response(
            content=body.encode("utf-8"),
            media_type="application/json",
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if candidate.is_dir():
            static_dir = candidate
    if static_dir is not None and static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
