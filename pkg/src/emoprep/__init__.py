"""Corpus preparation and curriculum planning for multi-speaker emotional TTS."""

__version__ = "0.1.0"

from .audio_io import AudioBuffer, read_wav, resample, write_wav
from .curriculum import TrainingPlan, default_plan, materialize, stage_at
from .dataset import (
    CorpusManifest, Emotion, Utterance, compute_stats, export_conditioning_spec, load_manifest,
    save_manifest, validate_for_training,
)
from .features import MelConfig, SpectrogramConfig, mel_filterbank, mel_spectrogram, stft_magnitude
from .sampler import BalancedSampler, ClipSpec, build_sampler
from .text_frontend import SymbolTable, decompose_syllable, compose_syllable, text_to_graphemes
from .vad import VadConfig, classify_frames, collect_segments, remove_silence
