"""Build a layered consequence DAG for a single policy episode.

The DAG starts from the policy text (the single root on layer 0) and grows
layer by layer: a generator proposes follow-on consequences for each frontier
node, near-duplicates within a layer are merged, and growth stops at
``max_depth`` or when a layer comes back empty. This demo uses the
deterministic stub generator, so the output is identical on every run.

Run with: python3 demos/01_build_a_consequence_dag.py
"""

from policydag import PolicyEpisode, RunConfig, make_backend, BackendProfile
from policydag.dagbuild import build_dag

episode = PolicyEpisode(
    episode_id="demo-carbon-tax",
    description="A carbon tax on industrial emitters is introduced",
    context={"jurisdiction": "EU", "year": "2021"},
)

config = RunConfig(max_depth=3, max_branch=3, random_seed=7)
backend = make_backend(BackendProfile(kind="stub", seed=7))

dag = build_dag(episode, config,
                generator=lambda req: backend.propose_consequences(req, config.temperature))

print(f"{len(dag.nodes)} nodes across {dag.max_depth_used + 1} layers\n")
for node in dag.nodes:
    indent = "  " * node.layer
    parents = ", ".join(sorted(node.parents)) or "root"
    print(f"{indent}{node.node_id}  [{parents}]  {node.text}")
