"""Compute a log-mel spectrogram and look at the filterbank."""
import numpy as np

from emoprep.features import MelConfig, hz_to_mel_slaney, mel_breakpoints, mel_filterbank, mel_spectrogram
from emoprep.audio_io import AudioBuffer

print("1 kHz sits at mel", hz_to_mel_slaney(1000.0))
edges = mel_breakpoints(MelConfig())
print("first filter edges (Hz):", np.round(edges[:3], 1))
print("last filter edges (Hz):", np.round(edges[-3:], 1))

fb = mel_filterbank(MelConfig(), 1024, 22050)
print("filterbank", fb.shape, "row sums of the first five:", np.round(fb.sum(axis=1)[:5], 4))

sr = 22050
t = np.arange(sr) / sr
chirp = 0.3 * np.sin(2 * np.pi * (100 + 3000 * t) * t)
spec = mel_spectrogram(AudioBuffer(chirp, sr))
print("log-mel", spec.values.shape, spec.values.dtype)
# The chirp sweeps upward, so the loudest band should climb over time.
peaks = spec.values.argmax(axis=0)
print("loudest mel band every 20 frames:", peaks[::20].tolist())

silence = mel_spectrogram(AudioBuffer(np.zeros(sr), sr))
print("silence floor:", float(silence.values.min()), "== ln(1e-5) =", float(np.log(1e-5)))
