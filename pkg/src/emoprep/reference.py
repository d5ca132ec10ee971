"""Composition of the reference Korean emotional speech corpus.

The corpora themselves are not redistributable; these tables let tests,
demos and dry runs work against a manifest of the same shape.

``PRINTED_HOURS`` is the published hours table (rows: speakers, columns:
emotions in :class:`Emotion` order, ``None`` = no recordings). Its cells are
rounded, so they do not add up to the published totals (the cells sum to
111.71 h against a printed 111.70 h). ``CELL_SECONDS`` holds integer-second
durations that round to every printed cell, row total, column total and the
grand total simultaneously.
"""
from __future__ import annotations

from .dataset import CorpusManifest, Emotion, Utterance, expected_mel_frames

SPEAKERS = (
    "kss-f",
    "ketts-30f", "ketts-30m",
    "ketts2-20m", "ketts2-30f", "ketts2-40m", "ketts2-50f", "ketts2-50m", "ketts2-60f",
    "ketts3-f", "ketts3-m",
)

_ = None
PRINTED_HOURS = {
    "kss-f": (12.59, _, _, _, _, _, _),
    "ketts-30f": (3.52, 3.46, 3.51, 3.68, 5.13, 3.75, 3.56),
    "ketts-30m": (3.37, 3.29, 3.31, 3.51, 3.50, 3.73, 3.40),
    "ketts2-20m": (0.72, 0.72, 0.74, 0.76, 0.69, 0.75, 0.70),
    "ketts2-30f": (0.66, 0.65, 0.67, 0.65, 0.70, 0.68, 0.68),
    "ketts2-40m": (0.73, 0.69, 0.70, 0.75, 0.69, 0.74, 0.69),
    "ketts2-50f": (0.73, 0.71, 0.71, 0.70, 0.72, 0.71, 0.69),
    "ketts2-50m": (0.68, 0.68, 0.69, 0.67, 0.68, 0.68, 0.65),
    "ketts2-60f": (0.77, 0.68, 0.67, 0.68, 0.72, 0.72, 0.67),
    "ketts3-f": (3.96, 1.34, _, 1.27, 1.44, 1.64, _),
    "ketts3-m": (3.90, 1.43, _, 1.18, 1.39, 1.48, _),
}
PRINTED_ROW_TOTALS = {
    "kss-f": 12.59, "ketts-30f": 26.61, "ketts-30m": 24.12,
    "ketts2-20m": 5.09, "ketts2-30f": 4.69, "ketts2-40m": 4.98, "ketts2-50f": 4.98,
    "ketts2-50m": 4.73, "ketts2-60f": 4.90, "ketts3-f": 9.64, "ketts3-m": 9.38,
}
PRINTED_COLUMN_TOTALS = (31.63, 13.65, 11.01, 13.85, 15.64, 14.87, 11.05)
PRINTED_GRAND_TOTAL = 111.70

CELL_SECONDS = {
    "kss-f": (45340, _, _, _, _, _, _),
    "ketts-30f": (12683, 12472, 12620, 13248, 18452, 13484, 12832),
    "ketts-30m": (12148, 11860, 11932, 12652, 12584, 13412, 12256),
    "ketts2-20m": (2608, 2576, 2680, 2720, 2471, 2716, 2536),
    "ketts2-30f": (2372, 2356, 2416, 2324, 2536, 2432, 2432),
    "ketts2-40m": (2612, 2468, 2536, 2684, 2468, 2680, 2497),
    "ketts2-50f": (2644, 2572, 2572, 2504, 2576, 2543, 2500),
    "ketts2-50m": (2432, 2432, 2468, 2428, 2464, 2464, 2324),
    "ketts2-60f": (2756, 2464, 2396, 2432, 2576, 2605, 2396),
    "ketts3-f": (14240, 4808, _, 4588, 5186, 5888, _),
    "ketts3-m": (14024, 5132, _, 4264, 5008, 5324, _),
}
del _


def present_pairs(table=CELL_SECONDS) -> list:
    return [(spk, Emotion(j)) for spk in SPEAKERS for j, v in enumerate(table[spk]) if v is not None]


def reference_manifest(cell_seconds=CELL_SECONDS, per_cell: int = 1, sample_rate: int = 22050) -> CorpusManifest:
    """Synthetic manifest with the reference per-cell durations.

    Each cell's duration is split over ``per_cell`` utterances whose
    durations sum exactly to the cell value. Audio paths are placeholders.
    """
    utts = []
    for spk in SPEAKERS:
        for j, total in enumerate(cell_seconds[spk]):
            if total is None:
                continue
            emo = Emotion(j)
            base, rem = divmod(total, per_cell)
            for k in range(per_cell):
                dur = base + (rem if k == per_cell - 1 else 0)
                uid = f"{spk}_{emo.abbrev}_{k:05d}"
                utts.append(Utterance(
                    id=uid, audio=f"{spk}/{uid}.wav", text="가나다", speaker=spk, emotion=emo,
                    duration_s=dur, n_mel_frames=expected_mel_frames(dur, sample_rate),
                ))
    return CorpusManifest(tuple(utts), SPEAKERS, sample_rate)
