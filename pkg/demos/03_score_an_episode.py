"""Score a flagged indicator set against analyst annotations.

Three set-based metrics compare the system's flagged set S with two
annotations: the government's stated focus G and an analyst relevance set R.

- coverage    = |S intersect G| / |G|        (how much of the stated agenda is found)
- discovery   = |S intersect (R - G)| / |R - G|  (relevant effects beyond the agenda)
- focus_ratio = |S intersect R| / |G intersect R| (breadth relative to the agenda)

Each metric is None when its denominator set is empty — undefined, not zero.

Run with: python3 demos/03_score_an_episode.py
"""

from policydag import aggregate, coverage, discovery, focus_ratio

S = {"gdp_growth", "inflation", "energy_prices", "social_trust"}
G = {"gdp_growth", "inflation"}
R = {"gdp_growth", "inflation", "energy_prices", "co2_emissions"}

print(f"coverage    = {coverage(S, G)}")
print(f"discovery   = {discovery(S, G, R)}")
print(f"focus_ratio = {focus_ratio(S, G, R)}")

# Undefined cases stay None instead of polluting averages with zeros:
print(f"\ncoverage with empty G: {coverage(S, frozenset())}")

agg = aggregate("coverage", [0.5, 1.0, None])
print(f"\naggregate of [0.5, 1.0, None]: mean={agg.mean}, std={agg.std_dev}, "
      f"defined {agg.n_defined}/{agg.n_total}")
