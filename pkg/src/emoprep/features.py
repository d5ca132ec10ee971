"""Log-mel spectrogram extraction.

Pipeline: reflect-padded STFT with a periodic Hann window, magnitude
spectrum, Slaney-scale triangular filterbank with area normalisation,
amplitude floor, natural log.
"""
from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import asdict, dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .audio_io import TARGET_RATE, AudioBuffer
from .errors import EmptyAudio, InvalidRange, MalformedMel, NegativeFrequency, WrongSampleRate

# Slaney mel scale: linear below 1 kHz, logarithmic above
_MIN_LOG_HZ = 1000.0
_MIN_LOG_MEL = 15.0
_LOGSTEP = math.log(6.4) / 27.0

MEL_MAGIC = b"MEL1"


@dataclass(frozen=True)
class SpectrogramConfig:
    n_fft: int = 1024
    hop: int = 256
    win_length: int = 1024

    def __post_init__(self):
        if not 0 < self.win_length <= self.n_fft:
            raise InvalidRange(f"win_length {self.win_length} must be in (0, n_fft={self.n_fft}]")
        if not 0 < self.hop <= self.win_length:
            raise InvalidRange(f"hop {self.hop} must be in (0, win_length={self.win_length}]")


@dataclass(frozen=True)
class MelConfig:
    n_mels: int = 80
    fmin: float = 0.0
    fmax: float = 8000.0
    clip_floor: float = 1e-5

    def __post_init__(self):
        if self.n_mels < 1:
            raise InvalidRange("n_mels must be >= 1")
        if not 0 <= self.fmin < self.fmax:
            raise InvalidRange(f"need 0 <= fmin < fmax, got {self.fmin}, {self.fmax}")
        if self.clip_floor <= 0:
            raise InvalidRange("clip_floor must be positive")


@dataclass(frozen=True, eq=False)
class MelSpectrogram:
    """``values`` has shape (n_mels, n_frames) and holds natural-log amplitudes."""

    values: np.ndarray
    sample_rate: int
    hop: int

    @property
    def n_mels(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


def hz_to_mel_slaney(f):
    """Slaney mel of frequency ``f`` (scalar or array, Hz)."""
    f_arr = np.asarray(f, dtype=np.float64)
    if np.any(f_arr < 0):
        raise NegativeFrequency(f"frequencies must be non-negative, got min {f_arr.min()}")
    safe = np.maximum(f_arr, _MIN_LOG_HZ)
    mel = np.where(f_arr < _MIN_LOG_HZ, f_arr * 3.0 / 200.0, _MIN_LOG_MEL + np.log(safe / _MIN_LOG_HZ) / _LOGSTEP)
    return float(mel) if mel.ndim == 0 else mel


def mel_to_hz_slaney(m):
    m_arr = np.asarray(m, dtype=np.float64)
    if np.any(m_arr < 0):
        raise NegativeFrequency(f"mel values must be non-negative, got min {m_arr.min()}")
    hz = np.where(m_arr < _MIN_LOG_MEL, m_arr * 200.0 / 3.0,
                  _MIN_LOG_HZ * np.exp(_LOGSTEP * (np.maximum(m_arr, _MIN_LOG_MEL) - _MIN_LOG_MEL)))
    return float(hz) if hz.ndim == 0 else hz


def mel_breakpoints(mel_cfg: MelConfig) -> np.ndarray:
    """The n_mels + 2 filter edge/centre frequencies in Hz."""
    lo, hi = hz_to_mel_slaney(mel_cfg.fmin), hz_to_mel_slaney(mel_cfg.fmax)
    return mel_to_hz_slaney(np.linspace(lo, hi, mel_cfg.n_mels + 2))


def filter_response(mel_cfg: MelConfig, freqs) -> np.ndarray:
    """Evaluate every triangular filter at arbitrary frequencies.

    Returns an array of shape (n_mels, len(freqs)).
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    edges = mel_breakpoints(mel_cfg)
    widths = np.diff(edges)
    ramps = edges[:, None] - freqs[None, :]
    rising = -ramps[:-2] / widths[:-1, None]
    falling = ramps[2:] / widths[1:, None]
    weights = np.maximum(0.0, np.minimum(rising, falling))
    area_norm = 2.0 / (edges[2:] - edges[:-2])
    return weights * area_norm[:, None]


def mel_filterbank(mel_cfg: MelConfig, n_fft: int, sample_rate: int) -> np.ndarray:
    """Slaney filterbank of shape (n_mels, n_fft // 2 + 1)."""
    # small tolerance so fmax == nyquist computed in float survives
    if mel_cfg.fmax > sample_rate / 2 * (1 + 1e-9):
        raise InvalidRange(f"fmax {mel_cfg.fmax} exceeds Nyquist {sample_rate / 2}")
    return _cached_filterbank(mel_cfg, n_fft, sample_rate).copy()


@lru_cache(maxsize=8)
def _cached_filterbank(mel_cfg, n_fft, sample_rate):
    fb = filter_response(mel_cfg, np.arange(n_fft // 2 + 1) * sample_rate / n_fft)
    fb.setflags(write=False)
    return fb


def periodic_hann(n: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / n))


def _window(cfg: SpectrogramConfig) -> np.ndarray:
    win = periodic_hann(cfg.win_length)
    # shorter windows are centred inside the FFT frame
    left = (cfg.n_fft - cfg.win_length) // 2
    return np.pad(win, (left, cfg.n_fft - cfg.win_length - left))


def stft_magnitude(buf: AudioBuffer, cfg: SpectrogramConfig = SpectrogramConfig()) -> np.ndarray:
    """One-sided STFT magnitude, shape (n_fft // 2 + 1, 1 + len // hop)."""
    x = buf.samples.astype(np.float64)
    if x.size == 0:
        raise EmptyAudio("cannot analyse an empty buffer")
    pad = cfg.n_fft // 2
    if x.size == 1:
        padded = np.full(x.size + 2 * pad, x[0])
    else:
        padded = np.pad(x, pad, mode="reflect")
    n_frames = 1 + x.size // cfg.hop
    frames = np.lib.stride_tricks.sliding_window_view(padded, cfg.n_fft)[::cfg.hop][:n_frames]
    return np.abs(np.fft.rfft(frames * _window(cfg), axis=1)).T


def mel_spectrogram(buf: AudioBuffer, s_cfg: SpectrogramConfig = SpectrogramConfig(),
                    m_cfg: MelConfig = MelConfig()) -> MelSpectrogram:
    if buf.sample_rate != TARGET_RATE:
        raise WrongSampleRate(f"expected {TARGET_RATE} Hz audio, got {buf.sample_rate} Hz")
    mag = stft_magnitude(buf, s_cfg)
    fb = mel_filterbank(m_cfg, s_cfg.n_fft, buf.sample_rate)
    mel = fb @ mag
    values = np.log(np.maximum(mel, m_cfg.clip_floor)).astype(np.float32)
    return MelSpectrogram(values, buf.sample_rate, s_cfg.hop)


def n_frames_for(n_samples: int, hop: int = 256) -> int:
    return 1 + n_samples // hop


# MEL1 container: magic, u32 n_mels, u32 n_frames, float32 row-major payload

def write_mel(spec: MelSpectrogram, path) -> None:
    values = np.ascontiguousarray(spec.values, dtype="<f4")
    with open(path, "wb") as f:
        f.write(MEL_MAGIC)
        f.write(struct.pack("<II", *values.shape))
        f.write(values.tobytes(order="C"))


def read_mel(path, sample_rate: int = TARGET_RATE, hop: int = 256) -> MelSpectrogram:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != MEL_MAGIC:
        raise MalformedMel(f"{path} is not a MEL1 file")
    n_mels, n_frames = struct.unpack_from("<II", data, 4)
    payload = data[12:]
    if len(payload) != 4 * n_mels * n_frames:
        raise MalformedMel(f"{path}: payload size does not match {n_mels}x{n_frames}")
    values = np.frombuffer(payload, dtype="<f4").reshape(n_mels, n_frames).astype(np.float32)
    return MelSpectrogram(values, sample_rate, hop)


def mel_sidecar(s_cfg: SpectrogramConfig, m_cfg: MelConfig, source_path, sample_rate=TARGET_RATE) -> dict:
    """Parameters and source hash recorded next to each MEL1 file."""
    digest = hashlib.sha256(Path(source_path).read_bytes()).hexdigest()
    return {
        "format": "MEL1",
        "sample_rate": sample_rate,
        "window": "hann-periodic",
        "center_padding": "reflect",
        "log": "natural",
        "stft": asdict(s_cfg),
        "mel": dict(asdict(m_cfg), scale="slaney", norm="slaney"),
        "source_sha256": digest,
    }


def write_sidecar(meta: dict, path) -> None:
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
