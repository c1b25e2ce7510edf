"""Evaluate a small corpus end to end and compare pipeline vs. baseline.

Writes a three-row CSV corpus, runs it twice with the deterministic stub
backend — once in full pipeline mode (DAG expansion) and once in baseline
mode (root-only, i.e. mapping straight off the policy text) — and prints the
aggregate comparison table. The same thing is available from the command
line as `policydag run` + `policydag compare`.

Run with: python3 demos/04_batch_run_and_compare.py
"""

import csv
import tempfile
from dataclasses import replace
from pathlib import Path

from policydag import RunConfig, comparison_table, default_vocabulary
from policydag.backend import BackendProfile
from policydag.cli import load_run_dir, run_batch

ROWS = [
    ["episode_id", "description", "government_focus", "relevance_set"],
    ["carbon_tax", "A carbon tax on industrial emitters is introduced",
     "gdp_growth;inflation", "gdp_growth;inflation;energy_prices;co2_emissions"],
    ["childcare", "Universal childcare subsidies are rolled out nationwide",
     "labor_participation", "labor_participation;household_income;poverty_rate"],
    ["rent_cap", "Rents in major cities are capped for five years",
     "housing_affordability", "housing_affordability;private_investment"],
]

vocab = default_vocabulary()
config = RunConfig(max_depth=2, max_branch=2, random_seed=42)
profile = BackendProfile(kind="stub", seed=42)

with tempfile.TemporaryDirectory() as tmp:
    corpus = Path(tmp) / "corpus.csv"
    with open(corpus, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(ROWS)

    runs = {}
    for name, cfg in (("pipeline", config),
                      ("baseline", replace(config, mode="baseline"))):
        out = Path(tmp) / name
        summary = run_batch(corpus, out, cfg, vocab, profile)
        counts = summary["counts"]
        print(f"{name}: ok={counts['ok']} skipped={counts['skipped']} "
              f"error={counts['error']}")
        runs[name] = load_run_dir(out)

    print()
    print(comparison_table(runs).to_text())
