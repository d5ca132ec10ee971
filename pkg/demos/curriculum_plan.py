"""The three-stage schedule and what data each stage sees."""
from emoprep.curriculum import default_plan, materialize, stage_at
from emoprep.reference import reference_manifest

plan = default_plan()
print("boundaries:", plan.boundaries)
for it in (0, 19_999, 20_000, 60_000, 114_999):
    print(f"iteration {it:>7} -> stage {stage_at(plan, it)}")

for stage, subset in zip(plan.stages, materialize(plan, reference_manifest(per_cell=3))):
    print(f"{stage.name:>16}: {len(subset):>3} utterances, {len(subset.pairs()):>2} pairs")

print(plan.to_json()[:200], "...")
