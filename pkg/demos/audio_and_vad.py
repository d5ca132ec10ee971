"""Trim leading and trailing silence from a synthetic utterance.

Run with ``python3 demos/audio_and_vad.py``.
"""
import numpy as np

from emoprep.audio_io import AudioBuffer, resample
from emoprep.vad import VadConfig, classify_frames, remove_silence

sr = 44100
t = np.arange(2 * sr) / sr
tone = (np.sin(2 * np.pi * 220 * t) + np.sin(2 * np.pi * 1300 * t)) / 4
signal = np.concatenate([np.zeros(sr), tone, np.zeros(sr)])
buf = AudioBuffer(signal, sr)
print(f"input: {buf.duration:.2f} s at {buf.sample_rate} Hz")

# The detector looks at 30 ms frames of a 16 kHz copy.
frames = classify_frames(resample(buf, 16000))
print("voiced frames:", int(frames.sum()), "of", len(frames))

for level in range(4):
    result = remove_silence(buf, VadConfig(aggressiveness=level))
    spans = ", ".join(f"{s.start_s:.2f}-{s.end_s:.2f}" for s in result.segments)
    print(f"aggressiveness {level}: kept {result.audio.duration:.2f} s from [{spans}]")

# Finally bring it to the model rate.
out = resample(remove_silence(buf).audio, 22050)
print(f"ready for features: {out.duration:.2f} s at {out.sample_rate} Hz")
