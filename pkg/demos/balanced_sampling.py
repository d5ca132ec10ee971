"""Draw batches that are balanced over speaker/emotion pairs rather than utterances."""
from collections import Counter
from dataclasses import replace

from emoprep.dataset import Emotion, Utterance
from emoprep.reference import reference_manifest
from emoprep.sampler import ClipSpec, build_sampler

# kss-f has many neutral clips, everyone else has few, yet each pair is drawn equally often.
corpus = reference_manifest(per_cell=2)
extra = reference_manifest(per_cell=40).filter(lambda u: u.speaker == "kss-f")
corpus = corpus.replace_utterances(
    corpus.utterances + tuple(replace(u, id="x" + u.id) for u in extra)
)

sampler = build_sampler(corpus, seed=7)
ids = sampler.next_batch(67_000)
by_id = corpus.by_id()
per_pair = Counter(by_id[i].pair for i in ids)
print("pairs:", len(per_pair), "min/max draws:", min(per_pair.values()), max(per_pair.values()))
print("kss-f neutral:", per_pair[("kss-f", Emotion.NEUTRAL)])

# Vocoder clips: anything shorter than the clip is skipped.
clip = ClipSpec(16000)
for n in (15999, 16000, 16010):
    utt = Utterance("u", "u.wav", "가", "kss-f", Emotion.NEUTRAL, 200.0, n)
    print(n, "->", sampler.select_clip(utt, clip))

print(sampler.provenance())
