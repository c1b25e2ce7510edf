from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import strategies as st

from policydag.backend import BackendProfile, make_backend
from policydag.model import (
    ConsequenceDag,
    ConsequenceNode,
    Direction,
    EpisodeMetrics,
    EpisodeRecord,
    IndicatorImpact,
    RunConfig,
    Status,
    default_vocabulary,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

GOLDEN_CONFIG = RunConfig(max_depth=2, max_branch=2, random_seed=42)
GOLDEN_BASELINE = RunConfig(max_depth=2, max_branch=2, mode="baseline", random_seed=42)


@pytest.fixture(scope="session")
def vocab():
    return default_vocabulary()


@pytest.fixture
def stub_backend():
    return make_backend(BackendProfile(kind="stub", seed=42))


@pytest.fixture
def golden_config():
    return GOLDEN_CONFIG


# ---------------------------------------------------------------------------
# hypothesis strategies for valid records

_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
    min_size=1,
    max_size=40,
)
_id_token = st.from_regex(r"[a-z][a-z0-9_]{0,11}", fullmatch=True)


@st.composite
def valid_dags(draw) -> ConsequenceDag:
    """Layered DAGs satisfying every structural invariant by construction."""
    depth = draw(st.integers(min_value=0, max_value=3))
    layers: list[list[ConsequenceNode]] = [
        [ConsequenceNode(node_id="L0N0", text=draw(_text), layer=0)]
    ]
    for layer in range(1, depth + 1):
        width = draw(st.integers(min_value=0, max_value=3))
        if width == 0:
            break
        prev = layers[-1]
        nodes = []
        for i in range(width):
            # at least one parent in the immediately preceding layer keeps
            # layer(n) = 1 + max parent layer true
            anchor = draw(st.sampled_from(prev)).node_id
            shallow_pool = [n.node_id for group in layers[:-1] for n in group]
            extra = draw(st.lists(st.sampled_from(shallow_pool), max_size=2)) if shallow_pool else []
            nodes.append(
                ConsequenceNode(
                    node_id=f"L{layer}N{i}",
                    text=draw(_text),
                    layer=layer,
                    parents=frozenset([anchor, *extra]),
                )
            )
        layers.append(nodes)
    all_nodes = tuple(n for group in layers for n in group)
    return ConsequenceDag(
        nodes=all_nodes, root_id="L0N0",
        max_depth_used=depth, max_branch_used=3,
    )


@st.composite
def valid_records(draw) -> EpisodeRecord:
    vocab_ids = draw(st.lists(_id_token, min_size=1, max_size=6, unique=True))
    status = draw(st.sampled_from(list(Status)))
    base = dict(
        episode_id=draw(_id_token),
        description=draw(_text),
        context=draw(st.dictionaries(_id_token, _text, max_size=3)),
        government_focus=frozenset(draw(st.lists(st.sampled_from(vocab_ids), max_size=4))),
        relevance_set=frozenset(draw(st.lists(st.sampled_from(vocab_ids), max_size=4))),
        config=RunConfig(random_seed=draw(st.none() | st.integers(0, 1000))),
        started_at=draw(st.floats(min_value=0, max_value=2e9, allow_nan=False)),
        finished_at=draw(st.floats(min_value=0, max_value=2e9, allow_nan=False)),
        diagnostics=tuple(draw(st.lists(_text, max_size=3))),
    )
    if status is not Status.OK:
        return EpisodeRecord(status=status, message=draw(_text), **base)
    dag = draw(valid_dags())
    node_ids = sorted(dag.node_ids())
    impacts = []
    for ind_id in vocab_ids:
        affected = draw(st.booleans())
        if affected:
            support = draw(st.lists(st.sampled_from(node_ids), min_size=1, max_size=3, unique=True))
            impacts.append(
                IndicatorImpact(
                    indicator_id=ind_id,
                    affected=True,
                    direction=draw(st.sampled_from(list(Direction))),
                    supporting_nodes=frozenset(support),
                )
            )
        else:
            impacts.append(IndicatorImpact(indicator_id=ind_id, affected=False))
    fraction = st.none() | st.floats(min_value=0, max_value=1, allow_nan=False)
    metrics = EpisodeMetrics(
        coverage=draw(fraction),
        discovery=draw(fraction),
        focus_ratio=draw(st.none() | st.floats(min_value=0, max_value=10, allow_nan=False)),
    )
    return EpisodeRecord(
        status=Status.OK, dag=dag, impacts=tuple(impacts), metrics=metrics, **base
    )
