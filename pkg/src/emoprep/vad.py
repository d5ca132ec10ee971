"""Voice activity detection and silence removal.

Frames are classified at 16 kHz by a sub-band log-energy detector; a
ring-buffer collector then turns per-frame decisions into padded voiced
segments, which are cut out of the source-rate audio and concatenated.

The detector compares each frame against a per-band noise floor estimated
from the utterance itself. Neither the floor nor the band energies depend
on the aggressiveness level; only the two decision thresholds do, and both
rise with the level. A frame voiced at a high level is therefore voiced at
every lower level.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .audio_io import AudioBuffer, resample
from .errors import BadSampleRate, TooShort

VAD_RATE = 16000

BANDS_HZ = ((80, 250), (250, 500), (500, 1000), (1000, 2000), (2000, 3000), (3000, 4000))

# indexed by aggressiveness 0..3; both sequences must be non-decreasing
ENERGY_THRESHOLD_DB = (-65.0, -60.0, -55.0, -50.0)
SNR_THRESHOLD_DB = (3.0, 6.0, 9.0, 12.0)

NOISE_PERCENTILE = 10.0
# a fully voiced utterance must not pull the floor up to speech level
NOISE_CEILING_DB = -45.0
_SILENT_DB = -120.0


@dataclass(frozen=True)
class VadConfig:
    aggressiveness: int = 3
    frame_ms: int = 30
    padding_ms: int = 150
    trigger_ratio: float = 0.9

    def __post_init__(self):
        if self.aggressiveness not in (0, 1, 2, 3):
            raise ValueError(f"aggressiveness must be 0-3, got {self.aggressiveness}")
        if self.frame_ms not in (10, 20, 30):
            raise ValueError(f"frame_ms must be 10, 20 or 30, got {self.frame_ms}")
        if self.padding_ms <= 0 or self.padding_ms % self.frame_ms:
            raise ValueError("padding_ms must be a positive multiple of frame_ms")
        if not 0 < self.trigger_ratio <= 1:
            raise ValueError("trigger_ratio must lie in (0, 1]")

    @property
    def frame_seconds(self) -> float:
        return self.frame_ms / 1000.0

    @property
    def ring_frames(self) -> int:
        return self.padding_ms // self.frame_ms


@dataclass(frozen=True)
class VoicedSegment:
    start_s: float
    end_s: float

    def __post_init__(self):
        if not 0 <= self.start_s < self.end_s:
            raise ValueError(f"invalid segment [{self.start_s}, {self.end_s})")

    @property
    def duration(self) -> float:
        return self.end_s - self.start_s


class SilenceRemoval(NamedTuple):
    audio: AudioBuffer
    segments: list
    no_speech: bool


def band_energies_db(buf: AudioBuffer, frame_ms: int = 30) -> np.ndarray:
    """Per-frame, per-band power in dBFS, shape (n_frames, len(BANDS_HZ)).

    A full-scale sine of amplitude A inside a band reads 10*log10(A**2 / 2).
    """
    if buf.sample_rate != VAD_RATE:
        raise BadSampleRate(f"VAD runs at {VAD_RATE} Hz, got {buf.sample_rate} Hz")
    n = VAD_RATE * frame_ms // 1000
    n_frames = len(buf) // n
    if n_frames == 0:
        raise TooShort(f"need at least {n} samples for one {frame_ms} ms frame, got {len(buf)}")
    frames = buf.samples[: n_frames * n].astype(np.float64).reshape(n_frames, n)
    win = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / n))
    power = np.abs(np.fft.rfft(frames * win, axis=1)) ** 2 * (2.0 / (n * np.sum(win ** 2)))
    freqs = np.fft.rfftfreq(n, 1.0 / VAD_RATE)
    bands = np.stack([power[:, (freqs >= lo) & (freqs < hi)].sum(axis=1) for lo, hi in BANDS_HZ], axis=1)
    return np.maximum(10.0 * np.log10(bands + 1e-30), _SILENT_DB)


def noise_floor_db(energies: np.ndarray) -> np.ndarray:
    return np.minimum(np.percentile(energies, NOISE_PERCENTILE, axis=0), NOISE_CEILING_DB)


def classify_frames(buf: AudioBuffer, cfg: VadConfig = VadConfig()) -> np.ndarray:
    """Boolean voiced/unvoiced decision for every complete frame of 16 kHz audio."""
    energies = band_energies_db(buf, cfg.frame_ms)
    floor = noise_floor_db(energies)
    power = (10.0 ** (energies / 10.0)).sum(axis=1)
    noise = (10.0 ** (floor / 10.0)).sum()
    total_db = 10.0 * np.log10(power)
    snr_db = total_db - 10.0 * np.log10(noise)
    a = cfg.aggressiveness
    return (total_db > ENERGY_THRESHOLD_DB[a]) & (snr_db > SNR_THRESHOLD_DB[a])


def collect_frame_ranges(decisions, cfg: VadConfig = VadConfig()) -> list:
    """Padded voiced runs as half-open frame index ranges ``(start, stop)``.

    A segment opens once more than ``trigger_ratio`` of the ring is voiced,
    reaching back to the oldest buffered frame, and closes once more than
    ``trigger_ratio`` of the ring is unvoiced, keeping those frames as a
    trailing collar. Voiced bursts shorter than the ring never open a segment.
    """
    ring = deque(maxlen=cfg.ring_frames)
    threshold = cfg.trigger_ratio * ring.maxlen
    ranges = []
    start = None
    for i, voiced in enumerate(decisions):
        ring.append((i, bool(voiced)))
        if start is None:
            if sum(v for _, v in ring) > threshold:
                start = ring[0][0]
                ring.clear()
        elif sum(not v for _, v in ring) > threshold:
            ranges.append((start, i + 1))
            start = None
            ring.clear()
    if start is not None:
        ranges.append((start, len(decisions)))
    return ranges


def collect_segments(decisions, cfg: VadConfig = VadConfig()) -> list:
    step = cfg.frame_seconds
    return [VoicedSegment(a * step, b * step) for a, b in collect_frame_ranges(decisions, cfg)]


def remove_silence(buf: AudioBuffer, cfg: VadConfig = VadConfig()) -> SilenceRemoval:
    """Cut ``buf`` down to its voiced segments.

    Classification happens on a 16 kHz copy; the cuts are applied to the
    original samples. When nothing is voiced the input comes back unchanged
    with ``no_speech`` set, so callers never receive empty audio.
    """
    probe = resample(buf, VAD_RATE)
    decisions = classify_frames(probe, cfg)
    ranges = collect_frame_ranges(decisions, cfg)
    if not ranges:
        return SilenceRemoval(AudioBuffer(buf.samples.copy(), buf.sample_rate), [], True)

    frame_len = VAD_RATE * cfg.frame_ms // 1000
    scale = buf.sample_rate / VAD_RATE
    n_frames = len(decisions)
    pieces, segments = [], []
    for a, b in ranges:
        lo = 0 if a == 0 else min(len(buf), int(round(a * frame_len * scale)))
        # the dropped partial frame at the tail belongs to a segment that runs to the end
        hi = len(buf) if b == n_frames else min(len(buf), int(round(b * frame_len * scale)))
        if hi > lo:
            pieces.append(buf.samples[lo:hi])
            segments.append(VoicedSegment(lo / buf.sample_rate, hi / buf.sample_rate))
    return SilenceRemoval(AudioBuffer(np.concatenate(pieces), buf.sample_rate), segments, False)
