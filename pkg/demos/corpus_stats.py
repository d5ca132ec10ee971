"""Per-speaker, per-emotion hours for a reference-shaped corpus."""
from emoprep.dataset import compute_stats, export_conditioning_spec, validate_for_training
from emoprep.reference import reference_manifest

corpus = reference_manifest()
stats = compute_stats(corpus)
print(stats.render())
print()
print(f"{len(corpus)} utterances, {len(corpus.pairs())} speaker/emotion pairs")

report = validate_for_training(corpus, [("ketts3-f", "disgust"), ("kss-f", "neutral")])
print("missing pairs:", report.missing_pairs)

spec = export_conditioning_spec(corpus)
print("conditioning widths: speaker", spec.speaker_dim, "emotion", spec.emotion_dim)
