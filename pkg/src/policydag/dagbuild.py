"""Breadth-wise, layer-by-layer construction of the consequence graph.

Each layer is produced by asking the proposal backend for downstream
consequences of the current frontier, merging near-duplicate candidates into
multi-parent nodes, and enforcing the configured depth and branching limits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Protocol

from .model import ConsequenceDag, ConsequenceNode, PolicyEpisode, RunConfig

SimilarityFn = Callable[[str, str], float]


@dataclass(frozen=True)
class ProposalRequest:
    description: str
    context: dict[str, str]
    frontier: tuple[tuple[str, str, int], ...]  # (node_id, text, layer)
    max_branch: int
    remaining_depth: int


@dataclass(frozen=True)
class Proposal:
    parent_id: str
    text: str


class ProposalGenerator(Protocol):
    def __call__(self, request: ProposalRequest) -> list[Proposal]: ...


def _tokens(text: str) -> frozenset[str]:
    return frozenset(re.findall(r"[a-z0-9]+", text.lower()))


def text_similarity(a: str, b: str) -> float:
    """Token-set Jaccard over lowercased, punctuation-stripped tokens.

    Two empty statements count as duplicates (similarity 1).
    """
    ta, tb = _tokens(a), _tokens(b)
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


def normalize_text(text: str) -> str:
    return " ".join(text.split())


def enforce_branch_limit(children_of_parent: list, max_branch: int) -> list:
    """Keep at most max_branch children in proposal order (first wins)."""
    if max_branch < 1:
        raise ValueError("max_branch must be positive")
    return children_of_parent[:max_branch]


def merge_layer(
    candidates: list[Proposal],
    existing_layer_nodes: list[ConsequenceNode],
    threshold: float,
    layer: int = 1,
    similarity: SimilarityFn = text_similarity,
) -> list[ConsequenceNode]:
    """Fold candidates into a single layer, merging near-duplicates.

    A candidate whose text is similar (>= threshold) to an already-placed
    node of this layer is absorbed into it: the node keeps its text (first
    candidate wins) and gains the candidate's parent. Otherwise the candidate
    becomes a new node.
    """
    out = list(existing_layer_nodes)
    for cand in candidates:
        text = normalize_text(cand.text)
        if not text:
            continue
        merged = False
        for i, node in enumerate(out):
            if similarity(node.text, text) >= threshold:
                out[i] = ConsequenceNode(
                    node_id=node.node_id,
                    text=node.text,
                    layer=node.layer,
                    parents=node.parents | {cand.parent_id},
                )
                merged = True
                break
        if not merged:
            out.append(
                ConsequenceNode(
                    node_id=f"L{layer}N{len(out)}",
                    text=text,
                    layer=layer,
                    parents=frozenset({cand.parent_id}),
                )
            )
    return out


def build_dag(
    episode: PolicyEpisode,
    config: RunConfig,
    generator: ProposalGenerator,
    similarity: SimilarityFn = text_similarity,
    diagnostics: list[str] | None = None,
) -> ConsequenceDag:
    """Expand the consequence graph until max_depth is reached or a layer
    comes back empty after merging.

    Defensive against misbehaving backends: proposals with unknown parents
    are dropped, per-parent batches are truncated to max_branch, and
    candidates that duplicate an earlier layer's node are discarded (an edge
    into a shallower layer would break the strict layer ordering).
    """
    diag = diagnostics if diagnostics is not None else []
    root = ConsequenceNode(node_id="L0N0", text=normalize_text(episode.description), layer=0)
    nodes: list[ConsequenceNode] = [root]
    frontier = [root]
    for layer in range(1, config.max_depth + 1):
        request = ProposalRequest(
            description=episode.description,
            context=dict(episode.context),
            frontier=tuple((n.node_id, n.text, n.layer) for n in frontier),
            max_branch=config.max_branch,
            remaining_depth=config.max_depth - layer + 1,
        )
        proposals = generator(request)

        frontier_ids = {n.node_id for n in frontier}
        by_parent: dict[str, list[Proposal]] = {n.node_id: [] for n in frontier}
        for p in proposals:
            if p.parent_id not in frontier_ids:
                diag.append(f"layer {layer}: dropped proposal with unknown parent {p.parent_id!r}")
                continue
            if not normalize_text(p.text):
                diag.append(f"layer {layer}: dropped empty proposal from {p.parent_id}")
                continue
            by_parent[p.parent_id].append(p)

        candidates: list[Proposal] = []
        for node in frontier:  # deterministic parent order
            batch = by_parent[node.node_id]
            kept = enforce_branch_limit(batch, config.max_branch)
            if len(kept) < len(batch):
                diag.append(
                    f"layer {layer}: truncated {node.node_id} from "
                    f"{len(batch)} to {len(kept)} proposals"
                )
            candidates.extend(kept)

        merged = merge_layer(candidates, [], config.merge_threshold, layer, similarity)

        # drop nodes duplicating an earlier layer (reuse would need an edge
        # into a shallower layer, which the layer invariant forbids)
        fresh: list[ConsequenceNode] = []
        for node in merged:
            dup = next((e for e in nodes if similarity(e.text, node.text) >= config.merge_threshold), None)
            if dup is not None:
                diag.append(f"layer {layer}: dropped candidate duplicating {dup.node_id}")
            else:
                fresh.append(node)
        # re-id after drops so ids stay dense within the layer
        fresh = [
            ConsequenceNode(node_id=f"L{layer}N{i}", text=n.text, layer=layer, parents=n.parents)
            for i, n in enumerate(fresh)
        ]
        if not fresh:
            break
        nodes.extend(fresh)
        frontier = fresh
    return ConsequenceDag(
        nodes=tuple(nodes),
        root_id=root.node_id,
        max_depth_used=config.max_depth,
        max_branch_used=config.max_branch,
    )


def root_only_dag(episode: PolicyEpisode, config: RunConfig) -> ConsequenceDag:
    """Degenerate graph used by baseline mode: the policy itself, no expansion."""
    root = ConsequenceNode(node_id="L0N0", text=normalize_text(episode.description), layer=0)
    return ConsequenceDag(
        nodes=(root,),
        root_id=root.node_id,
        max_depth_used=0,
        max_branch_used=config.max_branch,
    )
