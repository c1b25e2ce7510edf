"""Single-episode orchestration shared by the batch CLI and the HTTP service.

Keeping this in one place guarantees that a record produced through the
service is byte-identical to the batch record for the same inputs, config,
backend, and seed.
"""

from __future__ import annotations

import time
from typing import Callable

from .backend import RemoteBackend, StubBackend
from .dagbuild import build_dag, root_only_dag
from .errors import BackendError, MappingError
from .mapping import derive_flagged_set, map_indicators
from .metrics import coverage, discovery, focus_ratio
from .model import (
    EpisodeMetrics,
    EpisodeRecord,
    IndicatorVocabulary,
    PolicyEpisode,
    RunConfig,
    Status,
)

Clock = Callable[[], float]


def fixed_clock() -> float:
    """Zero clock used with the stub backend so records diff cleanly across runs."""
    return 0.0


def evaluate_episode(
    episode: PolicyEpisode,
    vocab: IndicatorVocabulary,
    config: RunConfig,
    backend: StubBackend | RemoteBackend,
    clock: Clock = time.time,
) -> EpisodeRecord:
    """Run build -> map -> metrics for one validated episode.

    Backend or mapping failures become a status=error record; they never
    propagate, so one bad episode cannot take down a batch.
    """
    started = clock()
    diagnostics: list[str] = []
    try:
        if config.mode == "baseline":
            dag = root_only_dag(episode, config)
        else:
            dag = build_dag(
                episode,
                config,
                generator=lambda req: backend.propose_consequences(
                    req, config.temperature, diagnostics
                ),
                diagnostics=diagnostics,
            )
        impacts = map_indicators(
            dag,
            vocab,
            episode,
            config,
            linker=lambda q: backend.link_indicator(q, config.link_temperature, diagnostics),
            diagnostics=diagnostics,
        )
    except (BackendError, MappingError) as exc:
        return EpisodeRecord(
            episode_id=episode.episode_id,
            description=episode.description,
            context=dict(episode.context),
            government_focus=episode.government_focus,
            relevance_set=episode.relevance_set,
            status=Status.ERROR,
            message=str(exc),
            config=config,
            started_at=started,
            finished_at=clock(),
            diagnostics=tuple(diagnostics),
        )
    flagged = derive_flagged_set(impacts)
    metrics = EpisodeMetrics(
        coverage=coverage(flagged, episode.government_focus),
        discovery=discovery(flagged, episode.government_focus, episode.relevance_set),
        focus_ratio=focus_ratio(flagged, episode.government_focus, episode.relevance_set),
    )
    return EpisodeRecord(
        episode_id=episode.episode_id,
        description=episode.description,
        context=dict(episode.context),
        government_focus=episode.government_focus,
        relevance_set=episode.relevance_set,
        status=Status.OK,
        dag=dag,
        impacts=impacts,
        metrics=metrics,
        config=config,
        started_at=started,
        finished_at=clock(),
        diagnostics=tuple(diagnostics),
    )


def skipped_record(
    episode: PolicyEpisode,
    violations: tuple[str, ...],
    config: RunConfig,
    clock: Clock = time.time,
) -> EpisodeRecord:
    now = clock()
    return EpisodeRecord(
        episode_id=episode.episode_id,
        description=episode.description,
        context=dict(episode.context),
        government_focus=episode.government_focus,
        relevance_set=episode.relevance_set,
        status=Status.SKIPPED,
        message="; ".join(violations),
        config=config,
        started_at=now,
        finished_at=now,
    )
