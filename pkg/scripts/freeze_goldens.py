"""One-time generation of the frozen golden files under tests/golden/.

Rerun only when stub behavior changes intentionally; every golden diff must
be reviewed, since the test suite asserts bit-for-bit equality against them.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from policydag.backend import BackendProfile, make_backend
from policydag.cli import load_run_dir, run_batch
from policydag.ingest import read_corpus
from policydag.metrics import comparison_table
from policydag.model import RunConfig, default_vocabulary, record_to_dict, serialize_record
from policydag.pipeline import evaluate_episode, fixed_clock

GOLDEN = ROOT / "tests" / "golden"
FIXTURES = ROOT / "tests" / "fixtures"

GOLDEN_CONFIG = RunConfig(max_depth=2, max_branch=2, random_seed=42)
GOLDEN_BASELINE = RunConfig(max_depth=2, max_branch=2, mode="baseline", random_seed=42)


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    vocab = default_vocabulary()
    profile = BackendProfile(kind="stub", seed=42)
    backend = make_backend(profile)

    rows = read_corpus(FIXTURES / "corpus_basic.xlsx", vocab)
    ep1 = rows[0][1]
    record = evaluate_episode(ep1, vocab, GOLDEN_CONFIG, backend, fixed_clock)
    (GOLDEN / "record_ep1_seed42.json").write_text(serialize_record(record), encoding="utf-8")
    (GOLDEN / "dag_ep1_seed42.json").write_text(
        json.dumps(record_to_dict(record)["dag"], indent=2) + "\n", encoding="utf-8")
    (GOLDEN / "impacts_ep1_seed42.json").write_text(
        json.dumps(record_to_dict(record)["impacts"], indent=2) + "\n", encoding="utf-8")

    baseline_record = evaluate_episode(ep1, vocab, GOLDEN_BASELINE, backend, fixed_clock)
    (GOLDEN / "record_ep1_baseline_seed42.json").write_text(
        serialize_record(baseline_record), encoding="utf-8")

    for mode, config in (("pipeline", GOLDEN_CONFIG), ("baseline", GOLDEN_BASELINE)):
        out = GOLDEN / f"run_{mode}"
        if out.exists():
            shutil.rmtree(out)
        run_batch(FIXTURES / "corpus_basic.xlsx", out, config, vocab, profile)
    table = comparison_table({
        "pipeline": load_run_dir(GOLDEN / "run_pipeline"),
        "baseline": load_run_dir(GOLDEN / "run_baseline"),
    })
    (GOLDEN / "comparison.csv").write_text(table.to_csv(), encoding="utf-8")
    print("goldens written to", GOLDEN)


if __name__ == "__main__":
    main()
