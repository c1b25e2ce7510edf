"""Batch command-line interface: corpus in, per-episode JSON records out."""

from __future__ import annotations

import hashlib
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .backend import BackendProfile, make_backend
from .errors import IngestError
from .ingest import SkipDecision, read_corpus
from .metrics import METRIC_NAMES, MetricAggregate, aggregate, comparison_table
from .model import (
    EpisodeRecord,
    RunConfig,
    Status,
    default_vocabulary,
    deserialize_record,
    load_vocabulary,
    serialize_record,
)
from .model import config_to_dict
from .pipeline import evaluate_episode, fixed_clock, skipped_record


def _safe_filename(episode_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", episode_id)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _aggregate_to_dict(agg: MetricAggregate) -> dict:
    return {
        "mean": agg.mean,
        "std_dev": agg.std_dev,
        "min": agg.min,
        "max": agg.max,
        "n_defined": agg.n_defined,
        "n_total": agg.n_total,
    }


def _run_id(input_path: Path, config: RunConfig) -> str:
    payload = json.dumps({"input": input_path.name, "config": config_to_dict(config)}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def build_summary(records: list[EpisodeRecord], run_id: str, config: RunConfig,
                  duration: float, total_rows: int) -> dict:
    counts = {status.value: 0 for status in Status}
    for r in records:
        counts[r.status.value] += 1
    assert counts["ok"] + counts["skipped"] + counts["error"] == total_rows, "status conservation"
    ordered = sorted(records, key=lambda r: r.episode_id)
    metric_aggs = {}
    for name in METRIC_NAMES:
        values = [
            getattr(r.metrics, name) if r.status is Status.OK and r.metrics else None
            for r in ordered
        ]
        metric_aggs[name] = _aggregate_to_dict(aggregate(name, values))
    return {
        "run_id": run_id,
        "counts": {**counts, "total": total_rows},
        "metrics": metric_aggs,
        "config": config_to_dict(config),
        "duration_seconds": duration,
    }


def run_batch(
    input_path: Path,
    output_dir: Path,
    config: RunConfig,
    vocab,
    profile: BackendProfile,
    api_key: str | None = None,
    concurrency: int = 4,
    overwrite: bool = False,
    sheet: str | None = None,
) -> dict:
    """Process every row of the corpus and write one record per episode.

    Returns the run summary dict (also written as summary.json). Raises
    IngestError for fatal input problems before any output is written.
    """
    rows = read_corpus(input_path, vocab, sheet_name=sheet)
    if output_dir.exists() and any(output_dir.iterdir()) and not overwrite:
        raise IngestError(f"output directory {output_dir} is not empty (use --overwrite)")
    output_dir.mkdir(parents=True, exist_ok=True)

    clock = fixed_clock if profile.kind == "stub" else time.time
    backend = make_backend(profile, api_key=api_key)
    started = clock()

    def process(item):
        row_index, payload = item
        if isinstance(payload, SkipDecision):
            return row_index, skipped_record(payload.episode, payload.violations, config, clock)
        return row_index, evaluate_episode(payload, vocab, config, backend, clock)

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        results = list(pool.map(process, rows))

    records = []
    for row_index, record in results:
        records.append(record)
        name = _safe_filename(record.episode_id) or f"row{row_index}"
        _atomic_write(output_dir / f"{name}.json", serialize_record(record))

    summary = build_summary(records, _run_id(input_path, config), config,
                            clock() - started, total_rows=len(rows))
    _atomic_write(output_dir / "summary.json",
                  json.dumps(summary, indent=2, ensure_ascii=False) + "\n")
    return summary


def format_summary(summary: dict) -> str:
    counts = summary["counts"]
    lines = [
        f"run {summary['run_id']}: "
        f"ok={counts['ok']} skipped={counts['skipped']} error={counts['error']} "
        f"(total {counts['total']})",
    ]
    for name, agg in summary["metrics"].items():
        if agg["n_defined"] == 0:
            lines.append(f"  {name}: undefined (0 of {agg['n_total']} episodes)")
        else:
            lines.append(
                f"  {name}: mean={agg['mean']:.4f} std={agg['std_dev']:.4f} "
                f"min={agg['min']:.4f} max={agg['max']:.4f} "
                f"({agg['n_defined']} of {agg['n_total']} episodes)"
            )
    return "\n".join(lines)


def _load_vocab(vocab_path: str | None):
    return load_vocabulary(vocab_path) if vocab_path else default_vocabulary()


@click.group()
def main() -> None:
    """Policy consequence graphs and indicator impact assessment."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True, path_type=Path))
@click.argument("output_dir", type=click.Path(path_type=Path))
@click.option("--model-name", default="stub", show_default=True)
@click.option("--temperature", default=0.7, show_default=True)
@click.option("--link-temperature", default=0.2, show_default=True)
@click.option("--max-depth", default=3, show_default=True)
@click.option("--max-branch", default=3, show_default=True)
@click.option("--max-links-per-node", default=5, show_default=True)
@click.option("--merge-threshold", default=0.8, show_default=True)
@click.option("--retry-limit", default=3, show_default=True)
@click.option("--api-endpoint", default="", help="Chat-completion endpoint URL (remote backend).")
@click.option("--api-key-env", default="POLICYDAG_API_KEY", show_default=True,
              help="Environment variable holding the API credential.")
@click.option("--mode", type=click.Choice(["pipeline", "baseline"]), default="pipeline",
              show_default=True)
@click.option("--backend", type=click.Choice(["remote", "stub"]), default="stub",
              show_default=True)
@click.option("--seed", default=0, show_default=True, help="Stub backend seed.")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True), default=None,
              help="Indicator vocabulary JSON file (default: built-in 19 indicators).")
@click.option("--sheet", default=None, help="Worksheet name (default: first sheet).")
@click.option("--concurrency", default=4, show_default=True)
@click.option("--overwrite", is_flag=True, help="Allow writing into a non-empty directory.")
def run(input_path: Path, output_dir: Path, model_name: str, temperature: float,
        link_temperature: float, max_depth: int, max_branch: int, max_links_per_node: int,
        merge_threshold: float, retry_limit: int, api_endpoint: str, api_key_env: str,
        mode: str, backend: str, seed: int, vocab_path: str | None, sheet: str | None,
        concurrency: int, overwrite: bool) -> None:
    """Run the full pipeline over an XLSX (or CSV) corpus."""
    config = RunConfig(
        model_name=model_name,
        temperature=temperature,
        link_temperature=link_temperature,
        max_depth=max_depth,
        max_branch=max_branch,
        max_links_per_node=max_links_per_node,
        api_endpoint=api_endpoint,
        api_key_ref=api_key_env,
        merge_threshold=merge_threshold,
        retry_limit=retry_limit,
        mode=mode,
        random_seed=seed if backend == "stub" else None,
    )
    profile = BackendProfile(
        kind=backend,
        endpoint=api_endpoint,
        model_name=model_name,
        api_key_ref=api_key_env,
        retry_limit=retry_limit,
        seed=seed,
    )
    api_key = os.environ.get(api_key_env) if backend == "remote" else None
    vocab = _load_vocab(vocab_path)
    try:
        summary = run_batch(
            input_path, output_dir, config, vocab, profile,
            api_key=api_key, concurrency=concurrency, overwrite=overwrite, sheet=sheet,
        )
    except IngestError as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    click.echo(format_summary(summary))


def load_run_dir(run_dir: Path) -> list[EpisodeRecord]:
    records = []
    for path in sorted(run_dir.glob("*.json")):
        if path.name == "summary.json":
            continue
        records.append(deserialize_record(path.read_text(encoding="utf-8")))
    return records


@main.command()
@click.argument("run_dirs", nargs=-1, required=True,
                type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Where to write the comparison CSV (default: comparison.csv in cwd).")
def compare(run_dirs: tuple[Path, ...], out: Path | None) -> None:
    """Compare metric aggregates across batch output directories."""
    runs = {d.name: load_run_dir(d) for d in run_dirs}
    try:
        table = comparison_table(runs)
    except ValueError as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(1)
    out = out or Path("comparison.csv")
    out.write_text(table.to_csv(), encoding="utf-8")
    click.echo(table.to_text())
    click.echo(f"wrote {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--profile-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of named RunConfig JSON profiles.")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True), default=None)
@click.option("--backend", type=click.Choice(["remote", "stub"]), default="stub",
              show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--concurrency", default=2, show_default=True)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="Built web UI assets to serve at / (default: autodetect frontend/dist).")
def serve(host: str, port: int, profile_dir: str | None, vocab_path: str | None,
          backend: str, seed: int, concurrency: int, static_dir: str | None) -> None:
    """Start the HTTP evaluation service (and the analyst UI, if built)."""
    import uvicorn

    from .service import create_app, load_profiles

    vocab = _load_vocab(vocab_path)
    profiles = load_profiles(Path(profile_dir)) if profile_dir else {}
    app = create_app(
        vocab=vocab,
        profiles=profiles,
        backend_kind=backend,
        seed=seed,
        concurrency=concurrency,
        static_dir=Path(static_dir) if static_dir else None,
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
