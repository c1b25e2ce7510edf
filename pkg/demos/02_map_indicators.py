"""Map a consequence DAG onto an indicator vocabulary.

For each indicator in the vocabulary the mapper asks the backend one
question: is this indicator plausibly affected by anything in the DAG, and if
so in which direction and via which nodes? The result is one impact entry per
indicator — affected entries carry a direction (increase / decrease /
ambiguous) and the supporting node ids.

Run with: python3 demos/02_map_indicators.py
"""

from policydag import (
    BackendProfile,
    PolicyEpisode,
    RunConfig,
    build_dag,
    default_vocabulary,
    derive_flagged_set,
    make_backend,
    map_indicators,
)

episode = PolicyEpisode(
    episode_id="demo-childcare",
    description="Universal childcare subsidies are rolled out nationwide",
)
config = RunConfig(max_depth=2, max_branch=2, random_seed=11)
backend = make_backend(BackendProfile(kind="stub", seed=11))
vocab = default_vocabulary()

dag = build_dag(episode, config,
                generator=lambda req: backend.propose_consequences(req, config.temperature))
impacts = map_indicators(dag, vocab, episode, config,
                         linker=lambda q: backend.link_indicator(q, config.link_temperature))

glyph = {"increase": "up", "decrease": "down", "ambiguous": "either way"}
for impact in impacts:
    if impact.affected:
        nodes = ", ".join(sorted(impact.supporting_nodes))
        print(f"  {impact.indicator_id:22s} {glyph[impact.direction.value]:10s} via {nodes}")
    else:
        print(f"  {impact.indicator_id:22s} unaffected")

flagged = derive_flagged_set(impacts)
print(f"\nflagged set S: {len(flagged)} of {len(vocab.indicators)} indicators")
