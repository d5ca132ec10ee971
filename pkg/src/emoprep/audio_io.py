"""WAV input/output and band-limited resampling.

Only the small subset of RIFF/WAVE the corpus tooling needs is handled:
PCM 16-bit and IEEE float 32-bit on input, PCM 16-bit on output. Anything
else is rejected with :class:`UnsupportedEncoding` rather than guessed at.
"""
from __future__ import annotations

import logging
import math
import struct
import wave
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import signal

from .errors import EmptyAudio, InvalidRate, IoFailure, MalformedWav, UnsupportedEncoding

log = logging.getLogger(__name__)

TARGET_RATE = 22050

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

# resampler design
KAISER_BETA = 12.0
TAPS_PER_PHASE = 64


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono waveform with its sample rate.

    Samples are stored as float32 in [-1, 1]; DSP code upcasts to float64.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float32)
        if samples.ndim != 1:
            raise ValueError("AudioBuffer holds mono audio only")
        if int(self.sample_rate) <= 0 or int(self.sample_rate) != self.sample_rate:
            raise InvalidRate(f"sample rate must be a positive integer, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


def _parse_chunks(data: bytes):
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav("missing RIFF/WAVE header")
    riff_size = struct.unpack_from("<I", data, 4)[0]
    if riff_size + 8 > len(data):
        raise MalformedWav(f"RIFF size {riff_size} exceeds file length {len(data)}")
    chunks = {}
    pos = 12
    end = riff_size + 8
    while pos + 8 <= end:
        cid = data[pos:pos + 4]
        size = struct.unpack_from("<I", data, pos + 4)[0]
        body = pos + 8
        if body + size > end:
            raise MalformedWav(f"chunk {cid!r} of size {size} runs past end of file")
        chunks.setdefault(cid, data[body:body + size])
        pos = body + size + (size & 1)
    return chunks


def read_wav(path) -> AudioBuffer:
    """Decode a PCM16 or float32 WAV file into a mono :class:`AudioBuffer`.

    Multi-channel input is averaged down to mono (with a logged warning).
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    chunks = _parse_chunks(data)
    fmt = chunks.get(b"fmt ")
    if fmt is None or len(fmt) < 16:
        raise MalformedWav("missing or short fmt chunk")
    if b"data" not in chunks:
        raise MalformedWav("missing data chunk")
    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt, 0)
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 26:
            raise MalformedWav("truncated WAVE_FORMAT_EXTENSIBLE header")
        # first two bytes of the SubFormat GUID carry the real format tag
        tag = struct.unpack_from("<H", fmt, 24)[0]

    if tag == WAVE_FORMAT_PCM and bits == 16:
        dtype, scale = np.dtype("<i2"), 1.0 / 32768.0
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype, scale = np.dtype("<f4"), 1.0
    else:
        raise UnsupportedEncoding(f"format tag 0x{tag:04X} with {bits} bits per sample")
    if channels < 1 or rate == 0:
        raise MalformedWav(f"invalid channel count {channels} or rate {rate}")
    if block_align != channels * dtype.itemsize:
        raise MalformedWav(f"block align {block_align} inconsistent with {channels}x{bits} bits")

    payload = chunks[b"data"]
    if len(payload) % block_align:
        raise MalformedWav("data chunk is not a whole number of frames")
    frames = np.frombuffer(payload, dtype=dtype).astype(np.float64) * scale
    if frames.size == 0:
        raise EmptyAudio(f"{path} contains no samples")
    frames = frames.reshape(-1, channels)
    if channels > 1:
        log.warning("%s: downmixing %d channels to mono", path, channels)
    mono = frames.mean(axis=1)
    return AudioBuffer(np.clip(mono, -1.0, 1.0), rate)


def write_wav(buf: AudioBuffer, path) -> None:
    """Write ``buf`` as 16-bit PCM mono, overwriting ``path``."""
    if len(buf) == 0:
        raise EmptyAudio("refusing to write an empty buffer")
    pcm = np.clip(np.round(buf.samples.astype(np.float64) * 32768.0), -32768, 32767)
    try:
        with wave.open(str(path), "wb") as f:
            f.setnchannels(1)
            f.setsampwidth(2)
            f.setframerate(buf.sample_rate)
            f.writeframes(pcm.astype("<i2").tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


@lru_cache(maxsize=32)
def _lowpass(up: int, down: int) -> np.ndarray:
    half = TAPS_PER_PHASE // 2 * up
    return signal.firwin(2 * half + 1, 1.0 / max(up, down), window=("kaiser", KAISER_BETA))


def resample(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Polyphase windowed-sinc resampling to ``target_rate``.

    Equal rates return an exact copy.
    """
    if target_rate is None or int(target_rate) <= 0:
        raise InvalidRate(f"target rate must be positive, got {target_rate}")
    target_rate = int(target_rate)
    if target_rate == buf.sample_rate:
        return AudioBuffer(buf.samples.copy(), buf.sample_rate)
    g = math.gcd(target_rate, buf.sample_rate)
    up, down = target_rate // g, buf.sample_rate // g
    out = signal.resample_poly(buf.samples.astype(np.float64), up, down, window=_lowpass(up, down))
    return AudioBuffer(np.clip(out, -1.0, 1.0), target_rate)
