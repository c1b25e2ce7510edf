"""Per-episode evaluation measures over (S, G, R) and corpus-level aggregation.

S is the system-flagged indicator set, G the government focus set, and R the
expert relevance set. Degenerate denominators yield None rather than zero so
that corpus statistics are never silently biased.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass

from .model import EpisodeRecord, Status

METRIC_NAMES = ("coverage", "discovery", "focus_ratio")

_METRIC_LABELS = {
    "coverage": "Expected-indicator coverage score",
    "discovery": "Overlooked-indicator discovery rate",
    "focus_ratio": "Model-government focus ratio",
}


def coverage(S: frozenset[str] | set[str], G: frozenset[str] | set[str]) -> float | None:
    """Share of government-focus indicators the system also flags."""
    if not G:
        return None
    return len(set(S) & set(G)) / len(G)


def discovery(
    S: frozenset[str] | set[str],
    G: frozenset[str] | set[str],
    R: frozenset[str] | set[str],
) -> float | None:
    """Share of relevant-but-unfocused indicators the system surfaces."""
    overlooked = set(R) - set(G)
    if not overlooked:
        return None
    return len(set(S) & overlooked) / len(overlooked)


def focus_ratio(
    S: frozenset[str] | set[str],
    G: frozenset[str] | set[str],
    R: frozenset[str] | set[str],
) -> float | None:
    """Breadth of system vs. government attention on the relevant subset."""
    g_common = set(G) & set(R)
    if not g_common:
        return None
    return len(set(S) & set(R)) / len(g_common)


@dataclass(frozen=True)
class MetricAggregate:
    name: str
    mean: float | None
    std_dev: float | None  # population
    min: float | None
    max: float | None
    n_defined: int
    n_total: int


def aggregate(name: str, values: list[float | None]) -> MetricAggregate:
    defined = [v for v in values if v is not None]
    if not defined:
        return MetricAggregate(name, None, None, None, None, 0, len(values))
    return MetricAggregate(
        name=name,
        mean=statistics.fmean(defined),
        std_dev=statistics.pstdev(defined),
        min=min(defined),
        max=max(defined),
        n_defined=len(defined),
        n_total=len(values),
    )


def _metric_values(records: list[EpisodeRecord], name: str) -> list[float | None]:
    out: list[float | None] = []
    for r in records:
        if r.status is Status.OK and r.metrics is not None:
            out.append(getattr(r.metrics, name))
        else:
            out.append(None)
    return out


@dataclass(frozen=True)
class ComparisonRow:
    system: str
    metric: str
    aggregate: MetricAggregate


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["system", "metric", "mean", "std_dev", "min", "max", "n_defined", "n_total"])
        for row in self.rows:
            a = row.aggregate
            writer.writerow([
                row.system,
                row.metric,
                _fmt(a.mean), _fmt(a.std_dev), _fmt(a.min), _fmt(a.max),
                a.n_defined, a.n_total,
            ])
        return buf.getvalue()

    def to_text(self) -> str:
        header = f"{'System':<16} {'Metric':<38} {'Mean':>8} {'Std. dev.':>10} {'Min':>8} {'Max':>8}"
        lines = [header, "-" * len(header)]
        for row in self.rows:
            a = row.aggregate
            label = _METRIC_LABELS.get(row.metric, row.metric)
            lines.append(
                f"{row.system:<16} {label:<38} "
                f"{_fmt(a.mean) or 'n/a':>8} {_fmt(a.std_dev) or 'n/a':>10} "
                f"{_fmt(a.min) or 'n/a':>8} {_fmt(a.max) or 'n/a':>8}"
            )
        return "\n".join(lines) + "\n"


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.6f}"


def comparison_table(runs: dict[str, list[EpisodeRecord]]) -> ComparisonTable:
    """One row per (system, metric) with mean/std/min/max over the run.

    All runs must cover the same episode ids; a mismatch is an error naming
    the offending ids.
    """
    if not runs:
        raise ValueError("no runs to compare")
    id_sets = {name: {r.episode_id for r in records} for name, records in runs.items()}
    reference_name = next(iter(id_sets))
    reference = id_sets[reference_name]
    for name, ids in id_sets.items():
        missing = reference - ids
        extra = ids - reference
        if missing or extra:
            raise ValueError(
                f"episode sets differ between {reference_name!r} and {name!r}: "
                f"missing {sorted(missing)}, extra {sorted(extra)}"
            )
    rows = []
    for system, records in runs.items():
        ordered = sorted(records, key=lambda r: r.episode_id)
        for metric in METRIC_NAMES:
            rows.append(
                ComparisonRow(
                    system=system,
                    metric=metric,
                    aggregate=aggregate(metric, _metric_values(ordered, metric)),
                )
            )
    return ComparisonTable(rows=tuple(rows))
