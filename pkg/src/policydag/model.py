"""Shared domain types, their invariants, and canonical JSON serialization.

Every other module communicates through the value objects defined here. All
types are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import dataclasses
import enum
import graphlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any


class Direction(str, enum.Enum):
    INCREASE = "increase"
    DECREASE = "decrease"
    AMBIGUOUS = "ambiguous"


class Status(str, enum.Enum):
    OK = "ok"
    SKIPPED = "skipped"
    ERROR = "error"


@dataclass(frozen=True)
class Indicator:
    id: str
    name: str
    definition: str = ""

    def __post_init__(self) -> None:
        if not self.id or any(c.isspace() for c in self.id):
            raise ValueError(f"indicator id must be non-empty and whitespace-free: {self.id!r}")


@dataclass(frozen=True)
class IndicatorVocabulary:
    indicators: tuple[Indicator, ...]
    version: str = "unversioned"

    def __post_init__(self) -> None:
        if not self.indicators:
            raise ValueError("vocabulary must not be empty")
        ids = [ind.id for ind in self.indicators]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate indicator ids in vocabulary")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(ind.id for ind in self.indicators)

    def __contains__(self, indicator_id: str) -> bool:
        return indicator_id in set(self.ids)

    def get(self, indicator_id: str) -> Indicator:
        for ind in self.indicators:
            if ind.id == indicator_id:
                return ind
        raise KeyError(indicator_id)

    def __len__(self) -> int:
        return len(self.indicators)


@dataclass(frozen=True)
class PolicyEpisode:
    episode_id: str
    description: str
    context: dict[str, str] = field(default_factory=dict)
    government_focus: frozenset[str] = frozenset()
    relevance_set: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ConsequenceNode:
    node_id: str
    text: str
    layer: int
    parents: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ConsequenceDag:
    nodes: tuple[ConsequenceNode, ...]
    root_id: str
    max_depth_used: int = 0
    max_branch_used: int = 0

    def node(self, node_id: str) -> ConsequenceNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def node_ids(self) -> frozenset[str]:
        return frozenset(n.node_id for n in self.nodes)

    def children_of(self, node_id: str) -> list[ConsequenceNode]:
        return [n for n in self.nodes if node_id in n.parents]

    def max_layer(self) -> int:
        return max(n.layer for n in self.nodes)


@dataclass(frozen=True)
class IndicatorImpact:
    indicator_id: str
    affected: bool
    direction: Direction | None = None
    supporting_nodes: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.affected and (self.direction is not None or self.supporting_nodes):
            raise ValueError("unaffected impact must carry no direction or supporting nodes")
        if self.affected and (self.direction is None or not self.supporting_nodes):
            raise ValueError("affected impact requires a direction and supporting nodes")


@dataclass(frozen=True)
class EpisodeMetrics:
    coverage: float | None = None
    discovery: float | None = None
    focus_ratio: float | None = None


@dataclass(frozen=True)
class RunConfig:
    model_name: str = "stub"
    temperature: float = 0.7
    link_temperature: float = 0.2
    max_depth: int = 3
    max_branch: int = 3
    max_links_per_node: int = 5
    api_endpoint: str = ""
    api_key_ref: str = "POLICYDAG_API_KEY"
    merge_threshold: float = 0.8
    retry_limit: int = 3
    mode: str = "pipeline"
    random_seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("pipeline", "baseline"):
            raise ValueError(f"mode must be 'pipeline' or 'baseline', got {self.mode!r}")
        if self.temperature < 0 or self.link_temperature < 0:
            raise ValueError("temperatures must be non-negative")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        for name in ("max_branch", "max_links_per_node", "retry_limit"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.merge_threshold <= 1.0:
            raise ValueError("merge_threshold must lie in [0, 1]")


@dataclass(frozen=True)
class EpisodeRecord:
    episode_id: str
    description: str
    context: dict[str, str]
    government_focus: frozenset[str]
    relevance_set: frozenset[str]
    status: Status
    message: str = ""
    dag: ConsequenceDag | None = None
    impacts: tuple[IndicatorImpact, ...] | None = None
    metrics: EpisodeMetrics | None = None
    config: RunConfig = field(default_factory=RunConfig)
    started_at: float = 0.0
    finished_at: float = 0.0
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.status is Status.OK:
            if self.dag is None or self.impacts is None or self.metrics is None:
                raise ValueError("ok record requires dag, impacts, and metrics")
        else:
            if self.dag is not None or self.impacts is not None or self.metrics is not None:
                raise ValueError("non-ok record must not carry payloads")
            if not self.message:
                raise ValueError("non-ok record requires a diagnostic message")


# ---------------------------------------------------------------------------
# validation


def validate_episode(episode: PolicyEpisode, vocab: IndicatorVocabulary) -> list[str]:
    """Return a list of violations; empty means the episode is well-formed."""
    violations = []
    if not episode.episode_id.strip():
        violations.append("missing episode_id")
    if not episode.description.strip():
        violations.append("missing description")
    known = set(vocab.ids)
    for label, ids in (("government_focus", episode.government_focus),
                       ("relevance_set", episode.relevance_set)):
        for ind_id in sorted(set(ids) - known):
            violations.append(f"unknown indicator id in {label}: {ind_id}")
    return violations


def validate_dag(dag: ConsequenceDag, max_depth: int | None = None,
                 max_branch: int | None = None) -> list[str]:
    """Check every structural invariant, including an independent
    topological-sort acyclicity check (not derived from layer ordering)."""
    violations = []
    by_id = {n.node_id: n for n in dag.nodes}
    if len(by_id) != len(dag.nodes):
        violations.append("duplicate node ids")
    if dag.root_id not in by_id:
        violations.append("root_id does not resolve")
        return violations
    roots = [n for n in dag.nodes if not n.parents]
    if len(roots) != 1 or roots[0].node_id != dag.root_id:
        violations.append("exactly one parentless node (the root) required")
    root = by_id[dag.root_id]
    if root.layer != 0:
        violations.append("root must sit at layer 0")
    for n in dag.nodes:
        for p in n.parents:
            if p not in by_id:
                violations.append(f"dangling parent {p} on {n.node_id}")
            elif by_id[p].layer >= n.layer:
                violations.append(f"edge {p}->{n.node_id} violates strict layer ordering")
        if n.parents:
            expected = 1 + max(by_id[p].layer for p in n.parents if p in by_id)
            if n.layer != expected:
                violations.append(f"{n.node_id} layer {n.layer} != 1 + max parent layer {expected - 1}")
    if max_depth is not None and dag.max_layer() > max_depth:
        violations.append(f"max layer {dag.max_layer()} exceeds depth limit {max_depth}")
    if max_branch is not None:
        for n in dag.nodes:
            count = len(dag.children_of(n.node_id))
            if count > max_branch:
                violations.append(f"{n.node_id} has {count} children, limit {max_branch}")
    # independent acyclicity check
    ts = graphlib.TopologicalSorter({n.node_id: set(n.parents) for n in dag.nodes})
    try:
        ts.prepare()
    except graphlib.CycleError:
        violations.append("cycle detected by topological sort")
    return violations


# ---------------------------------------------------------------------------
# canonical JSON serialization


def _dag_to_dict(dag: ConsequenceDag) -> dict[str, Any]:
    nodes = sorted(dag.nodes, key=lambda n: (n.layer, n.node_id))
    return {
        "root_id": dag.root_id,
        "max_depth_used": dag.max_depth_used,
        "max_branch_used": dag.max_branch_used,
        "nodes": [
            {
                "node_id": n.node_id,
                "text": n.text,
                "layer": n.layer,
                "parents": sorted(n.parents),
            }
            for n in nodes
        ],
    }


def _dag_from_dict(d: dict[str, Any]) -> ConsequenceDag:
    return ConsequenceDag(
        nodes=tuple(
            ConsequenceNode(
                node_id=n["node_id"], text=n["text"], layer=n["layer"],
                parents=frozenset(n["parents"]),
            )
            for n in d["nodes"]
        ),
        root_id=d["root_id"],
        max_depth_used=d["max_depth_used"],
        max_branch_used=d["max_branch_used"],
    )


def _impact_to_dict(imp: IndicatorImpact) -> dict[str, Any]:
    d: dict[str, Any] = {"indicator_id": imp.indicator_id, "affected": imp.affected}
    if imp.affected:
        d["direction"] = imp.direction.value
        d["supporting_nodes"] = sorted(imp.supporting_nodes)
    return d


def _impact_from_dict(d: dict[str, Any]) -> IndicatorImpact:
    if d["affected"]:
        return IndicatorImpact(
            indicator_id=d["indicator_id"], affected=True,
            direction=Direction(d["direction"]),
            supporting_nodes=frozenset(d["supporting_nodes"]),
        )
    return IndicatorImpact(indicator_id=d["indicator_id"], affected=False)


def config_to_dict(cfg: RunConfig) -> dict[str, Any]:
    return {
        "model_name": cfg.model_name,
        "temperature": cfg.temperature,
        "link_temperature": cfg.link_temperature,
        "max_depth": cfg.max_depth,
        "max_branch": cfg.max_branch,
        "max_links_per_node": cfg.max_links_per_node,
        "api_endpoint": cfg.api_endpoint,
        "api_key_ref": cfg.api_key_ref,
        "merge_threshold": cfg.merge_threshold,
        "retry_limit": cfg.retry_limit,
        "mode": cfg.mode,
        "random_seed": cfg.random_seed,
    }


def record_to_dict(record: EpisodeRecord) -> dict[str, Any]:
    """Canonical dict form: fixed key order, nodes sorted by (layer, node_id)."""
    d: dict[str, Any] = {
        "episode_id": record.episode_id,
        "description": record.description,
        "context": {k: record.context[k] for k in sorted(record.context)},
        "government_focus": sorted(record.government_focus),
        "relevance_set": sorted(record.relevance_set),
        "status": record.status.value,
        "message": record.message,
    }
    if record.status is Status.OK:
        assert record.dag is not None and record.impacts is not None
        assert record.metrics is not None
        d["dag"] = _dag_to_dict(record.dag)
        d["impacts"] = [_impact_to_dict(i) for i in record.impacts]
        d["metrics"] = {
            "coverage": record.metrics.coverage,
            "discovery": record.metrics.discovery,
            "focus_ratio": record.metrics.focus_ratio,
        }
    d["config"] = config_to_dict(record.config)
    d["started_at"] = record.started_at
    d["finished_at"] = record.finished_at
    d["diagnostics"] = list(record.diagnostics)
    return d


def record_from_dict(d: dict[str, Any]) -> EpisodeRecord:
    status = Status(d["status"])
    metrics = None
    if status is Status.OK:
        m = d["metrics"]
        metrics = EpisodeMetrics(
            coverage=m["coverage"], discovery=m["discovery"], focus_ratio=m["focus_ratio"],
        )
    return EpisodeRecord(
        episode_id=d["episode_id"],
        description=d["description"],
        context=dict(d["context"]),
        government_focus=frozenset(d["government_focus"]),
        relevance_set=frozenset(d["relevance_set"]),
        status=status,
        message=d["message"],
        dag=_dag_from_dict(d["dag"]) if status is Status.OK else None,
        impacts=tuple(_impact_from_dict(i) for i in d["impacts"]) if status is Status.OK else None,
        metrics=metrics,
        config=RunConfig(**d["config"]),
        started_at=d["started_at"],
        finished_at=d["finished_at"],
        diagnostics=tuple(d["diagnostics"]),
    )


def serialize_record(record: EpisodeRecord) -> str:
    return json.dumps(record_to_dict(record), indent=2, ensure_ascii=False) + "\n"


def deserialize_record(text: str) -> EpisodeRecord:
    return record_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# vocabulary loading


def vocabulary_from_dict(d: dict[str, Any]) -> IndicatorVocabulary:
    return IndicatorVocabulary(
        indicators=tuple(
            Indicator(id=e["id"], name=e["name"], definition=e.get("definition", ""))
            for e in d["indicators"]
        ),
        version=d.get("version", "unversioned"),
    )


def load_vocabulary(path: str | Path) -> IndicatorVocabulary:
    with open(path, encoding="utf-8") as fh:
        return vocabulary_from_dict(json.load(fh))


def default_vocabulary() -> IndicatorVocabulary:
    text = resources.files("policydag.data").joinpath("default_vocabulary.json").read_text("utf-8")
    return vocabulary_from_dict(json.loads(text))
