"""Policy consequence graphs, indicator impact mapping, and batch evaluation."""

from .backend import BackendProfile, make_backend, stub_generate
from .dagbuild import (
    Proposal,
    ProposalRequest,
    build_dag,
    enforce_branch_limit,
    merge_layer,
    root_only_dag,
    text_similarity,
)
from .errors import BackendError, IngestError, MappingError, PolicydagError
from .ingest import SkipDecision, read_corpus
from .mapping import LinkQuery, LinkVerdict, derive_flagged_set, map_indicators
from .metrics import (
    MetricAggregate,
    aggregate,
    comparison_table,
    coverage,
    discovery,
    focus_ratio,
)
from .model import (
    ConsequenceDag,
    ConsequenceNode,
    Direction,
    EpisodeMetrics,
    EpisodeRecord,
    Indicator,
    IndicatorImpact,
    IndicatorVocabulary,
    PolicyEpisode,
    RunConfig,
    Status,
    default_vocabulary,
    deserialize_record,
    load_vocabulary,
    serialize_record,
    validate_dag,
    validate_episode,
)
from .pipeline import evaluate_episode, skipped_record

__version__ = "0.1.0"
