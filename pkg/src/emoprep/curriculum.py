"""Staged curriculum plans.

A plan is an ordered list of stages, each a data filter plus an iteration
budget, together with optimiser and vocoder settings that downstream
trainers read as plain metadata. Nothing here trains anything.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field, replace

from .dataset import CorpusManifest, Emotion
from .errors import EmptyStage, PlanExhausted, UnknownStageSpeaker
from .sampler import ClipSpec

SINGLE_SPEAKER = "single_speaker"
NEUTRAL_ONLY = "neutral_only"
ALL = "all"
FILTER_KINDS = (SINGLE_SPEAKER, NEUTRAL_ONLY, ALL)


@dataclass(frozen=True)
class StageFilter:
    kind: str
    speaker: str | None = None

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"unknown stage filter {self.kind!r}")
        if (self.kind == SINGLE_SPEAKER) != (self.speaker is not None):
            raise ValueError("single_speaker filters, and only they, name a speaker")

    def matches(self, utt) -> bool:
        if self.kind == ALL:
            return True
        if self.kind == NEUTRAL_ONLY:
            return utt.emotion == Emotion.NEUTRAL
        return utt.speaker == self.speaker and utt.emotion == Emotion.NEUTRAL


def single_speaker(label: str) -> StageFilter:
    return StageFilter(SINGLE_SPEAKER, label)


def neutral_only() -> StageFilter:
    return StageFilter(NEUTRAL_ONLY)


def all_data() -> StageFilter:
    return StageFilter(ALL)


@dataclass(frozen=True)
class Stage:
    name: str
    filter: StageFilter
    iterations: int

    def __post_init__(self):
        if self.iterations <= 0:
            raise ValueError(f"stage {self.name!r}: iterations must be positive")


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: str = "adam"
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-6
    weight_decay: float = 1e-6


@dataclass(frozen=True)
class BatchLayout:
    batch_size: int
    devices: int

    @property
    def per_device(self) -> int:
        return self.batch_size // self.devices


@dataclass(frozen=True)
class TrainingPlan:
    stages: tuple
    acoustic_optimizer: OptimizerConfig = OptimizerConfig()
    grad_clip_norm: float = 1.0
    acoustic_batch: BatchLayout = BatchLayout(64, 4)
    vocoder_optimizer: OptimizerConfig = OptimizerConfig(lr=1e-4, weight_decay=0.0)
    vocoder_batch: BatchLayout = BatchLayout(24, 3)
    vocoder_iterations: int = 400_000
    vocoder_clip: ClipSpec = ClipSpec()
    vocoder_weight_norm: bool = True
    z_sigma_train: float = 1.0
    z_sigma_infer: float = 0.75
    manual_advance: bool = False
    reset_optimizer_on_stage: bool = False
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a plan needs at least one stage")
        object.__setattr__(self, "stages", tuple(self.stages))
        positive = (self.grad_clip_norm, self.vocoder_iterations, self.z_sigma_train, self.z_sigma_infer,
                    self.acoustic_optimizer.lr, self.vocoder_optimizer.lr)
        if any(v <= 0 for v in positive):
            raise ValueError("plan metadata must be positive")

    @property
    def boundaries(self) -> list:
        """Cumulative iteration count at the end of each stage."""
        return list(itertools.accumulate(s.iterations for s in self.stages))

    @property
    def total_iterations(self) -> int:
        return self.boundaries[-1]

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("notes")
        d["stages"] = [{"name": s.name, "filter": asdict(s.filter), "iterations": s.iterations} for s in self.stages]
        d["boundaries"] = self.boundaries
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingPlan":
        d = dict(d)
        d.pop("boundaries", None)
        stages = tuple(Stage(s["name"], StageFilter(**s["filter"]), s["iterations"]) for s in d.pop("stages"))
        return cls(
            stages=stages,
            acoustic_optimizer=OptimizerConfig(**d.pop("acoustic_optimizer")),
            acoustic_batch=BatchLayout(**d.pop("acoustic_batch")),
            vocoder_optimizer=OptimizerConfig(**d.pop("vocoder_optimizer")),
            vocoder_batch=BatchLayout(**d.pop("vocoder_batch")),
            vocoder_clip=ClipSpec(**d.pop("vocoder_clip")),
            **d,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainingPlan":
        return cls.from_dict(json.loads(text))


def default_plan(first_speaker: str = "kss-f", clip: ClipSpec | None = None) -> TrainingPlan:
    """Single-speaker neutral, then all neutral speech, then everything."""
    stages = (
        Stage("single_speaker_neutral", single_speaker(first_speaker), 20_000),
        Stage("multi_speaker_neutral", neutral_only(), 30_000),
        Stage("multi_speaker_emotional", all_data(), 65_000),
    )
    plan = TrainingPlan(stages)
    return replace(plan, vocoder_clip=clip) if clip is not None else plan


def stage_at(plan: TrainingPlan, iteration: int) -> int:
    """Index of the stage whose half-open iteration interval contains ``iteration``."""
    if iteration < 0:
        raise ValueError("iteration must be non-negative")
    for i, end in enumerate(plan.boundaries):
        if iteration < end:
            return i
    raise PlanExhausted(f"iteration {iteration} is past the plan total {plan.total_iterations}")


def materialize(plan: TrainingPlan, corpus: CorpusManifest) -> list:
    """One sub-manifest per stage, in stage order."""
    out = []
    for n, stage in enumerate(plan.stages):
        f = stage.filter
        if f.kind == SINGLE_SPEAKER and f.speaker not in corpus.speakers:
            raise UnknownStageSpeaker(f"stage {n} speaker {f.speaker!r} is not in the corpus")
        sub = corpus.filter(f.matches)
        if len(sub) == 0:
            raise EmptyStage(f"stage {n} ({stage.name}) matches no utterances")
        out.append(sub)
    return out
