"""Corpus manifests, hour statistics, training readiness checks, and the
speaker/emotion conditioning contract handed to external trainers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from enum import IntEnum
from fractions import Fraction
from pathlib import Path

from .errors import DuplicateId, EmptyCorpus, MissingField, ParseError, UnknownEmotion

NO_SPEECH = "no_speech"

SPEAKER_DIM = 5
EMOTION_DIM = 3


class Emotion(IntEnum):
    NEUTRAL = 0
    ANGER = 1
    DISGUST = 2
    FEAR = 3
    HAPPINESS = 4
    SADNESS = 5
    SURPRISE = 6

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def abbrev(self) -> str:
        return self.label[:3]

    @classmethod
    def parse(cls, value) -> "Emotion":
        if isinstance(value, Emotion):
            return value
        if isinstance(value, str):
            try:
                return cls[value.strip().upper()]
            except KeyError:
                pass
        raise UnknownEmotion(f"unknown emotion {value!r}; expected one of {[e.label for e in cls]}")


@dataclass(frozen=True)
class Utterance:
    id: str
    audio: str
    text: str
    speaker: str
    emotion: Emotion
    duration_s: float | None = None
    n_mel_frames: int | None = None
    flags: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "emotion", Emotion.parse(self.emotion))
        object.__setattr__(self, "flags", tuple(self.flags))
        if self.duration_s is not None:
            object.__setattr__(self, "duration_s", float(self.duration_s))
        if self.duration_s is not None and not self.duration_s > 0:
            raise ValueError(f"utterance {self.id}: duration_s must be positive")
        if self.n_mel_frames is not None and self.n_mel_frames < 1:
            raise ValueError(f"utterance {self.id}: n_mel_frames must be >= 1")

    @property
    def pair(self) -> tuple:
        return (self.speaker, self.emotion)

    @property
    def no_speech(self) -> bool:
        return NO_SPEECH in self.flags

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "audio": self.audio,
            "text": self.text,
            "speaker": self.speaker,
            "emotion": self.emotion.label,
            "duration_s": self.duration_s,
            "n_mel_frames": self.n_mel_frames,
            "flags": list(self.flags),
        }


def expected_mel_frames(duration_s: float, sample_rate: int = 22050, hop: int = 256) -> int:
    return 1 + int(round(duration_s * sample_rate)) // hop


@dataclass(frozen=True)
class CorpusManifest:
    utterances: tuple = ()
    speakers: tuple = ()
    sample_rate: int = 22050

    def __post_init__(self):
        utts = tuple(self.utterances)
        speakers = tuple(self.speakers) or tuple(dict.fromkeys(u.speaker for u in utts))
        declared = set(speakers)
        seen = set()
        for u in utts:
            if u.id in seen:
                raise DuplicateId(f"duplicate utterance id {u.id!r}")
            seen.add(u.id)
            if u.speaker not in declared:
                raise ParseError(f"utterance {u.id!r} has undeclared speaker {u.speaker!r}")
        object.__setattr__(self, "utterances", utts)
        object.__setattr__(self, "speakers", speakers)

    def __len__(self):
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    def ids(self) -> list:
        return [u.id for u in self.utterances]

    def by_id(self) -> dict:
        return {u.id: u for u in self.utterances}

    def pairs(self) -> set:
        return {u.pair for u in self.utterances}

    def filter(self, predicate) -> "CorpusManifest":
        return CorpusManifest(tuple(u for u in self.utterances if predicate(u)), self.speakers, self.sample_rate)

    def replace_utterances(self, utterances) -> "CorpusManifest":
        return CorpusManifest(tuple(utterances), self.speakers, self.sample_rate)


_REQUIRED = ("id", "audio", "text", "speaker", "emotion")


def utterance_from_dict(obj: dict, line=None) -> Utterance:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", line)
    for key in _REQUIRED:
        if key not in obj:
            raise MissingField(f"missing field {key!r}", line)
    try:
        emotion = Emotion.parse(obj["emotion"])
    except UnknownEmotion as exc:
        raise UnknownEmotion(str(exc), line) from None
    duration = obj.get("duration_s")
    frames = obj.get("n_mel_frames")
    flags = obj.get("flags") or []
    try:
        return Utterance(
            id=str(obj["id"]),
            audio=str(obj["audio"]),
            text=str(obj["text"]),
            speaker=str(obj["speaker"]),
            emotion=emotion,
            duration_s=None if duration is None else float(duration),
            n_mel_frames=None if frames is None else int(frames),
            flags=tuple(str(f) for f in flags),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), line) from None


def parse_manifest_lines(lines, speakers=None, sample_rate: int = 22050) -> CorpusManifest:
    utts, seen = [], set()
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
        utt = utterance_from_dict(obj, lineno)
        if utt.id in seen:
            raise DuplicateId(f"duplicate utterance id {utt.id!r}", lineno)
        if speakers is not None and utt.speaker not in speakers:
            raise ParseError(f"undeclared speaker {utt.speaker!r}", lineno)
        seen.add(utt.id)
        utts.append(utt)
    return CorpusManifest(tuple(utts), tuple(speakers or ()), sample_rate)


def load_manifest(path, speakers=None, sample_rate: int = 22050) -> CorpusManifest:
    """Read a JSONL manifest.

    Speakers are declared in first-appearance order unless ``speakers`` is
    given, in which case any other label is an error.
    """
    with open(path, encoding="utf-8") as f:
        return parse_manifest_lines(f, speakers, sample_rate)


def dump_manifest(corpus: CorpusManifest) -> str:
    return "".join(json.dumps(u.to_dict(), ensure_ascii=False) + "\n" for u in corpus)


def save_manifest(corpus: CorpusManifest, path) -> None:
    Path(path).write_text(dump_manifest(corpus), encoding="utf-8")


# ---------------------------------------------------------------- statistics

def round_hours(seconds: Fraction) -> Decimal:
    """Hours to two decimals, half-up."""
    cents = math.floor(Fraction(seconds) / 36 + Fraction(1, 2))
    return Decimal(cents).scaleb(-2)


@dataclass
class CorpusStats:
    """Exact per-(speaker, emotion) durations in seconds.

    Durations are summed as exact rationals so totals equal the sum of
    their cells; rounding happens only when hours are rendered.
    """

    speakers: tuple
    cells: dict = field(default_factory=dict)
    missing_duration: int = 0

    def seconds(self, speaker=None, emotion=None) -> Fraction:
        return sum((s for (spk, emo), s in self.cells.items()
                    if (speaker is None or spk == speaker) and (emotion is None or emo == emotion)),
                   Fraction(0))

    def has(self, speaker=None, emotion=None) -> bool:
        return any((speaker is None or spk == speaker) and (emotion is None or emo == emotion)
                   for spk, emo in self.cells)

    def hours(self, speaker=None, emotion=None):
        """Rounded hours, or ``None`` where no utterance exists (blank cell).

        The grand total (both arguments ``None``) is never blank.
        """
        if (speaker is not None or emotion is not None) and not self.has(speaker, emotion):
            return None
        return round_hours(self.seconds(speaker, emotion))

    @property
    def total_seconds(self) -> Fraction:
        return self.seconds()

    def to_dict(self) -> dict:
        def fmt(v):
            return None if v is None else float(v)
        rows = {}
        for spk in self.speakers:
            rows[spk] = {"all": fmt(self.hours(spk)), **{e.label: fmt(self.hours(spk, e)) for e in Emotion}}
        rows["all"] = {"all": fmt(self.hours()), **{e.label: fmt(self.hours(None, e)) for e in Emotion}}
        return {"unit": "hours", "rounding": "half-up, 2 decimals", "rows": rows,
                "total_seconds": float(self.total_seconds), "missing_duration": self.missing_duration}

    def render(self) -> str:
        header = ["Speaker", "all"] + [e.abbrev for e in Emotion]
        body = []
        for spk in list(self.speakers) + [None]:
            cells = [self.hours(spk)] + [self.hours(spk, e) for e in Emotion]
            body.append([spk or "all"] + ["" if c is None else f"{c:.2f}" for c in cells])
        widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
        lines = []
        for r in [header] + body:
            lines.append("  ".join([r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]))
        lines.insert(1, "-" * len(lines[0]))
        lines.insert(len(lines) - 1, "-" * len(lines[0]))
        return "\n".join(lines)


def compute_stats(corpus: CorpusManifest) -> CorpusStats:
    stats = CorpusStats(tuple(corpus.speakers))
    for u in corpus:
        if u.duration_s is None:
            stats.missing_duration += 1
            continue
        stats.cells[u.pair] = stats.cells.get(u.pair, Fraction(0)) + Fraction(u.duration_s)
    return stats


# ----------------------------------------------------------- training checks

@dataclass
class TrainingReport:
    missing_pairs: list = field(default_factory=list)
    no_speech: list = field(default_factory=list)
    too_short_for_vocoder: list = field(default_factory=list)
    unknown_length: list = field(default_factory=list)

    @property
    def problems(self) -> list:
        out = [f"missing pair {s}/{e.label}" for s, e in self.missing_pairs]
        out += [f"no speech detected: {i}" for i in self.no_speech]
        out += [f"too short for vocoder clips: {i}" for i in self.too_short_for_vocoder]
        return out

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_dict(self) -> dict:
        return {
            "missing_pairs": [[s, e.label] for s, e in self.missing_pairs],
            "no_speech": self.no_speech,
            "too_short_for_vocoder": self.too_short_for_vocoder,
            "unknown_length": self.unknown_length,
            "ok": self.ok,
        }


def validate_for_training(corpus: CorpusManifest, required_pairs=(), clip_frames: int = 16000) -> TrainingReport:
    """Report-only readiness check; never raises on corpus content."""
    present = corpus.pairs()
    required = {(s, Emotion.parse(e)) for s, e in required_pairs}
    report = TrainingReport(missing_pairs=sorted(required - present, key=lambda p: (p[0], int(p[1]))))
    for u in corpus:
        if u.no_speech:
            report.no_speech.append(u.id)
        if u.n_mel_frames is None:
            report.unknown_length.append(u.id)
        elif u.n_mel_frames < clip_frames:
            report.too_short_for_vocoder.append(u.id)
    return report


# ------------------------------------------------------- conditioning export

@dataclass(frozen=True)
class ConditioningSpec:
    speakers: tuple
    emotions: tuple = tuple(e.label for e in Emotion)
    speaker_dim: int = SPEAKER_DIM
    emotion_dim: int = EMOTION_DIM

    def to_dict(self) -> dict:
        return {
            "speaker_dim": self.speaker_dim,
            "emotion_dim": self.emotion_dim,
            "concat_into": ["decoder_lstm_1_context", "decoder_lstm_2_context", "mel_projection_input"],
            "speakers": [{"index": i, "label": s, "trainable": True} for i, s in enumerate(self.speakers)],
            "emotions": [
                {"index": 0, "label": self.emotions[0], "trainable": False, "vector": [0.0] * self.emotion_dim}
            ] + [
                {"index": i, "label": e, "trainable": True, "vector": None}
                for i, e in enumerate(self.emotions) if i > 0
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def export_conditioning_spec(corpus: CorpusManifest) -> ConditioningSpec:
    """Speaker slots in declared order; neutral is pinned to a fixed zero vector."""
    if not corpus.speakers:
        raise EmptyCorpus("corpus declares no speakers")
    return ConditioningSpec(tuple(corpus.speakers))
