"""Aligns a consequence graph with the indicator vocabulary.

One linking query is issued per indicator so that a single backend failure
never poisons the rest of the assessment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .errors import BackendError, MappingError
from .model import (
    ConsequenceDag,
    Direction,
    Indicator,
    IndicatorImpact,
    IndicatorVocabulary,
    PolicyEpisode,
    RunConfig,
)


@dataclass(frozen=True)
class LinkQuery:
    description: str
    context: dict[str, str]
    nodes: tuple[tuple[str, str, int], ...]  # (node_id, text, layer)
    indicator: Indicator
    max_links: int


@dataclass(frozen=True)
class LinkVerdict:
    affected: bool
    direction: Direction | None = None
    supporting_node_ids: tuple[str, ...] = ()


class IndicatorLinker(Protocol):
    def __call__(self, query: LinkQuery) -> LinkVerdict: ...


def _repair(
    verdict: LinkVerdict,
    indicator_id: str,
    dag: ConsequenceDag,
    max_links: int,
    diag: list[str],
) -> IndicatorImpact:
    if not verdict.affected:
        return IndicatorImpact(indicator_id=indicator_id, affected=False)
    known = dag.node_ids()
    kept = []
    for node_id in verdict.supporting_node_ids:
        if node_id in known:
            if node_id not in kept:
                kept.append(node_id)
        else:
            diag.append(f"{indicator_id}: dropped unresolvable supporting node {node_id!r}")
    if len(kept) > max_links:
        diag.append(f"{indicator_id}: truncated supporting nodes from {len(kept)} to {max_links}")
        kept = kept[:max_links]
    if not kept:
        diag.append(f"{indicator_id}: demoted to unaffected (no resolvable support)")
        return IndicatorImpact(indicator_id=indicator_id, affected=False)
    direction = verdict.direction if verdict.direction is not None else Direction.AMBIGUOUS
    return IndicatorImpact(
        indicator_id=indicator_id,
        affected=True,
        direction=direction,
        supporting_nodes=frozenset(kept),
    )


def map_indicators(
    dag: ConsequenceDag,
    vocab: IndicatorVocabulary,
    episode: PolicyEpisode,
    config: RunConfig,
    linker: IndicatorLinker,
    diagnostics: list[str] | None = None,
) -> tuple[IndicatorImpact, ...]:
    """Produce exactly one impact entry per vocabulary indicator, in order.

    A backend failure on a single indicator yields an unaffected entry with
    a diagnostic; the episode only fails if every indicator query fails.
    """
    diag = diagnostics if diagnostics is not None else []
    nodes = tuple(
        (n.node_id, n.text, n.layer)
        for n in sorted(dag.nodes, key=lambda n: (n.layer, n.node_id))
    )
    impacts: list[IndicatorImpact] = []
    failures = 0
    for indicator in vocab.indicators:
        query = LinkQuery(
            description=episode.description,
            context=dict(episode.context),
            nodes=nodes,
            indicator=indicator,
            max_links=config.max_links_per_node,
        )
        try:
            verdict = linker(query)
        except BackendError as exc:
            failures += 1
            diag.append(f"{indicator.id}: backend failure, recorded as unaffected ({exc})")
            impacts.append(IndicatorImpact(indicator_id=indicator.id, affected=False))
            continue
        impacts.append(_repair(verdict, indicator.id, dag, config.max_links_per_node, diag))
    if failures == len(vocab):
        raise MappingError("all indicator queries failed")
    return tuple(impacts)


def derive_flagged_set(impacts: tuple[IndicatorImpact, ...] | list[IndicatorImpact]) -> frozenset[str]:
    """The system-flagged indicator set: every indicator marked affected."""
    return frozenset(imp.indicator_id for imp in impacts if imp.affected)
