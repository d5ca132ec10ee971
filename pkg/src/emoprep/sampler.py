"""Speaker-emotion balanced oversampling and vocoder clip selection.

Every draw first picks a (speaker, emotion) pair uniformly, then an
utterance uniformly within that pair, with replacement. Scarce pairs are
therefore seen as often as abundant ones.

Randomness comes from numpy's Philox counter-based generator seeded
through a ``SeedSequence``; per-worker samplers are derived with
:meth:`BalancedSampler.spawn`, so a run is reproducible from one seed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dataset import CorpusManifest, Emotion, Utterance
from .errors import EmptyCorpus

RNG_ALGORITHM = "numpy.random.Philox-4x64-10"
DEFAULT_CLIP_FRAMES = 16000


class PairKey(NamedTuple):
    speaker: str
    emotion: Emotion


@dataclass(frozen=True)
class ClipSpec:
    clip_frames: int = DEFAULT_CLIP_FRAMES

    def __post_init__(self):
        if self.clip_frames <= 0:
            raise ValueError("clip_frames must be positive")


class BalancedSampler:
    def __init__(self, index: dict, seed, _seed_seq=None):
        if not index:
            raise EmptyCorpus("sampler needs at least one non-empty speaker-emotion pair")
        self.pairs = sorted(index, key=lambda p: (p[0], int(p[1])))
        self.index = {p: list(index[p]) for p in self.pairs}
        if any(not ids for ids in self.index.values()):
            raise ValueError("every indexed pair needs at least one utterance")
        self.seed = seed
        self._seed_seq = _seed_seq if _seed_seq is not None else np.random.SeedSequence(seed)
        self.rng = np.random.Generator(np.random.Philox(self._seed_seq))
        self._sizes = np.array([len(self.index[p]) for p in self.pairs])

    def __repr__(self):
        return f"BalancedSampler({len(self.pairs)} pairs, seed={self.seed})"

    def draw_indices(self, n: int):
        """Pair indices and within-pair utterance indices for ``n`` draws."""
        pair_idx = self.rng.integers(0, len(self.pairs), size=n)
        utt_idx = self.rng.integers(0, self._sizes[pair_idx])
        return pair_idx, utt_idx

    def next_batch(self, batch_size: int) -> list:
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        pair_idx, utt_idx = self.draw_indices(batch_size)
        return [self.index[self.pairs[p]][u] for p, u in zip(pair_idx, utt_idx)]

    def select_clip(self, utt: Utterance, clip: ClipSpec = ClipSpec()):
        """``(start_frame, clip_frames)``, or ``None`` when the utterance is too short."""
        if utt.n_mel_frames is None:
            raise ValueError(f"utterance {utt.id} has no mel frame count")
        slack = utt.n_mel_frames - clip.clip_frames
        if slack < 0:
            return None
        return int(self.rng.integers(0, slack + 1)), clip.clip_frames

    def spawn(self, n: int) -> list:
        """Independent child samplers over the same index, e.g. one per data-loader worker."""
        return [BalancedSampler(self.index, self.seed, child) for child in self._seed_seq.spawn(n)]

    def provenance(self) -> dict:
        return {
            "rng": RNG_ALGORITHM,
            "numpy": np.__version__,
            "seed": self.seed,
            "spawn_key": list(self._seed_seq.spawn_key),
            "n_pairs": len(self.pairs),
        }


def build_sampler(corpus: CorpusManifest, seed) -> BalancedSampler:
    """Index every pair present in ``corpus``; pairs without utterances are simply absent."""
    if len(corpus) == 0:
        raise EmptyCorpus("cannot sample from an empty corpus")
    index = {}
    for u in corpus:
        index.setdefault(PairKey(u.speaker, u.emotion), []).append(u.id)
    return BalancedSampler(index, seed)


def next_batch(s: BalancedSampler, batch_size: int) -> list:
    return s.next_batch(batch_size)


def select_clip(utt: Utterance, clip: ClipSpec, s: BalancedSampler):
    return s.select_clip(utt, clip)


def vocoder_eligible(corpus: CorpusManifest, clip: ClipSpec = ClipSpec()) -> CorpusManifest:
    """Drop utterances shorter than one clip; they are excluded from vocoder training."""
    return corpus.filter(lambda u: u.n_mel_frames is not None and u.n_mel_frames >= clip.clip_frames)
