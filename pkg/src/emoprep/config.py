"""Run configuration: an INI file with one section per stage.

Precedence, lowest to highest: built-in defaults, config file, CLI flags.
Relative paths in the file are resolved against the file's directory.

Example::

    [pipeline]
    manifest = corpus.jsonl
    out = build
    workers = 4
    seed = 7

    [vad]
    aggressiveness = 3

    [sampler]
    clip_frames = 16000
"""
from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .features import MelConfig, SpectrogramConfig
from .sampler import ClipSpec
from .vad import VadConfig


@dataclass(frozen=True)
class PipelineConfig:
    manifest: Path | None = None
    out: Path | None = None
    workers: int = 1
    seed: int = 0
    batch_size: int = 64
    batches: int = 100
    first_speaker: str = "kss-f"
    vad: VadConfig = field(default_factory=VadConfig)
    stft: SpectrogramConfig = field(default_factory=SpectrogramConfig)
    mel: MelConfig = field(default_factory=MelConfig)
    clip: ClipSpec = field(default_factory=ClipSpec)

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def processing_params(self) -> dict:
        """Everything that can change an output byte; paths and worker count excluded."""
        return {
            "seed": self.seed,
            "batch_size": self.batch_size,
            "batches": self.batches,
            "first_speaker": self.first_speaker,
            "vad": asdict(self.vad),
            "stft": asdict(self.stft),
            "mel": asdict(self.mel),
            "clip": asdict(self.clip),
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.processing_params(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def _coerce(cls, section: configparser.SectionProxy, base):
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, raw in section.items():
        if key not in known:
            raise ValueError(f"unknown key {key!r} in [{section.name}]")
        current = getattr(base, key)
        kwargs[key] = int(raw) if isinstance(current, int) else float(raw)
    return replace(base, **kwargs)


_SECTIONS = {"vad": VadConfig, "stft": SpectrogramConfig, "mel": MelConfig}


def load_config(path=None) -> PipelineConfig:
    cfg = PipelineConfig()
    if path is None:
        return cfg
    path = Path(path)
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise FileNotFoundError(f"config file {path} not found")
    for name in parser.sections():
        section = parser[name]
        if name == "pipeline":
            updates = {}
            for key, raw in section.items():
                if key in ("manifest", "out"):
                    p = Path(raw)
                    updates[key] = p if p.is_absolute() else path.parent / p
                elif key in ("workers", "seed", "batch_size", "batches"):
                    updates[key] = int(raw)
                elif key == "first_speaker":
                    updates[key] = raw
                else:
                    raise ValueError(f"unknown key {key!r} in [pipeline]")
            cfg = replace(cfg, **updates)
        elif name == "sampler":
            for key, raw in section.items():
                if key in ("batch_size", "batches"):
                    cfg = replace(cfg, **{key: int(raw)})
                elif key == "clip_frames":
                    cfg = replace(cfg, clip=ClipSpec(int(raw)))
                else:
                    raise ValueError(f"unknown key {key!r} in [sampler]")
        elif name in _SECTIONS:
            cfg = replace(cfg, **{name: _coerce(_SECTIONS[name], section, getattr(cfg, name))})
        else:
            raise ValueError(f"unknown config section [{name}]")
    return cfg
