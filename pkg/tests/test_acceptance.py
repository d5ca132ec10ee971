"""Acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line; the lines are also collected into an
``acceptance`` section at the end of the pytest run.
"""
import json
import math
import time

import numpy as np
from scipy import stats

from emoprep.audio_io import AudioBuffer, write_wav
from emoprep.cli import main
from emoprep.curriculum import default_plan, materialize
from emoprep.dataset import CorpusManifest, Emotion, Utterance, compute_stats
from emoprep.features import (
    MelConfig, filter_response, hz_to_mel_slaney, mel_filterbank, mel_spectrogram, mel_to_hz_slaney, n_frames_for,
    stft_magnitude,
)
from emoprep.reference import SPEAKERS, reference_manifest
from emoprep.sampler import ClipSpec, build_sampler
from emoprep.text_frontend import compose_syllable, decompose_syllable, NUCLEI, ONSETS, CODAS
from emoprep.vad import VadConfig, remove_silence

from conftest import criterion, multitone


def test_criterion_01_jamo_roundtrip():
    with criterion(1, "jamo exhaustive roundtrip") as c:
        assert (len(ONSETS), len(NUCLEI), len(CODAS)) == (19, 21, 28)
        t0 = time.perf_counter()
        seen = set()
        for cp in range(0xAC00, 0xD7A4):
            o, n, k = decompose_syllable(chr(cp))
            assert 0 <= o < 19 and 0 <= n < 21 and 0 <= k < 28
            assert compose_syllable(o, n, k) == chr(cp)
            seen.add((o, n, k))
        elapsed = time.perf_counter() - t0
        assert len(seen) == 11_172
        assert elapsed < 1.0, f"{elapsed:.3f}s"
        c.detail = f"11172 syllables in {elapsed:.3f}s"


def test_criterion_02_mel_scale():
    with criterion(2, "Slaney mel scale") as c:
        assert abs(hz_to_mel_slaney(1000.0) - 15.0) <= 1e-9
        assert abs(hz_to_mel_slaney(8000.0) - (15 + 27 * math.log(8) / math.log(6.4))) <= 1e-9
        f = np.arange(0, 8001, dtype=np.float64)
        err = float(np.max(np.abs(mel_to_hz_slaney(hz_to_mel_slaney(f)) - f)))
        assert err < 1e-6
        c.detail = f"max roundtrip error {err:.2e} Hz"


def test_criterion_03_filterbank():
    with criterion(3, "mel filterbank shape and apex height") as c:
        fb = mel_filterbank(MelConfig(), 1024, 22050)
        assert fb.shape == (80, 513) and (fb >= 0).all()
        # closed-form breakpoints, computed without the library
        lo, hi = 0.0, 15 + math.log(8) / (math.log(6.4) / 27)

        def to_hz(m):
            return 200 * m / 3 if m < 15 else 1000 * math.exp((m - 15) * math.log(6.4) / 27)

        edges = [to_hz(lo + (hi - lo) * i / 81) for i in range(82)]
        expected = np.array([2 / (edges[m + 2] - edges[m]) for m in range(80)])
        apex = np.diag(filter_response(MelConfig(), edges[1:-1]))
        err = float(np.max(np.abs(apex - expected)))
        assert err <= 1e-9
        assert (fb.max(axis=1) <= expected + 1e-12).all()
        c.detail = f"max apex error {err:.1e}"


def test_criterion_04_log_mel_floor():
    with criterion(4, "log-mel floor and frame-count law") as c:
        spec = mel_spectrogram(AudioBuffer(np.zeros(22050, dtype=np.float32), 22050))
        assert spec.values.shape == (80, 87)
        assert float(np.max(np.abs(spec.values - math.log(1e-5)))) <= 1e-6
        rng = np.random.default_rng(0)
        noise = rng.standard_normal(2560).astype(np.float32) * 0.1
        for n in range(1, 2561):
            assert n_frames_for(n) == 1 + n // 256
            assert stft_magnitude(AudioBuffer(noise[:n], 22050)).shape[1] == 1 + n // 256
        c.detail = "80x87 at ln(1e-5); lengths 1..2560"


def test_criterion_05_vad():
    with criterion(5, "VAD trimmed duration and aggressiveness monotonicity") as c:
        sr = 16000
        x = np.concatenate([np.zeros(sr), multitone(2.0, sr, 0.5), np.zeros(sr)])
        durations = [remove_silence(AudioBuffer(x, sr), VadConfig(aggressiveness=a)).audio.duration for a in range(4)]
        assert all(2.0 <= d <= 2.3 for d in durations), durations
        rng = np.random.default_rng(2024)
        for _ in range(100):
            rate = int(rng.choice([16000, 22050, 44100]))
            noise_amp = 10 ** rng.uniform(-4.5, -1.5)
            parts = [rng.normal(0, noise_amp, int(rng.uniform(0.1, 1.0) * rate))]
            for _ in range(int(rng.integers(1, 4))):
                amp = 10 ** rng.uniform(-2.5, -0.5)
                tone = multitone(rng.uniform(0.05, 1.0), rate, amp)
                parts.append(tone + rng.normal(0, noise_amp, len(tone)))
                parts.append(rng.normal(0, noise_amp, int(rng.uniform(0.05, 0.8) * rate)))
            # one clearly loud segment so the no-speech fallback never triggers
            parts.append(multitone(0.6, rate, 0.5))
            parts.append(rng.normal(0, noise_amp, int(0.3 * rate)))
            sig = np.clip(np.concatenate(parts), -1, 1)
            out = [remove_silence(AudioBuffer(sig, rate), VadConfig(aggressiveness=a)).audio.duration
                   for a in range(4)]
            assert all(a >= b for a, b in zip(out, out[1:])), out
        c.detail = f"tone output {durations[0]:.2f}s; 100 random inputs monotone"


def test_criterion_06_sampler_uniformity():
    with criterion(6, "balanced sampler uniformity and determinism") as c:
        t0 = time.perf_counter()
        sizes = {pair: 1 + (i * 13) % 29 for i, pair in enumerate(reference_manifest().pairs())}
        utts = [Utterance(f"{spk}-{int(e)}-{i}", "a.wav", "가", spk, e, 1.0, 100)
                for (spk, e), n in sizes.items() for i in range(n)]
        corpus = CorpusManifest(tuple(utts))
        sampler = build_sampler(corpus, 20_240)
        assert len(sampler.pairs) == 67
        pair_idx, _ = sampler.draw_indices(100_000)
        counts = np.bincount(pair_idx, minlength=67)
        chi2 = float(((counts - 100_000 / 67) ** 2 / (100_000 / 67)).sum())
        bound = float(stats.chi2.ppf(0.999, 66))
        assert chi2 < bound
        a, b = build_sampler(corpus, 7), build_sampler(corpus, 7)
        assert a.next_batch(10_000) == b.next_batch(10_000)
        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0
        c.detail = f"chi2 {chi2:.1f} < {bound:.1f}; {elapsed:.2f}s"


def test_criterion_07_clip_rule():
    with criterion(7, "vocoder clip exclusion and offsets") as c:
        s = build_sampler(reference_manifest(), 1)
        clip = ClipSpec()

        def utt(n):
            return Utterance("x", "x.wav", "가", "s", Emotion.NEUTRAL, 1.0, n)

        assert s.select_clip(utt(15_999), clip) is None
        assert s.select_clip(utt(16_000), clip) == (0, 16_000)
        offsets = {s.select_clip(utt(16_010), clip)[0] for _ in range(1_000)}
        assert offsets == set(range(11))
        c.detail = "offsets 0..10 all observed"


def test_criterion_08_curriculum():
    with criterion(8, "curriculum boundaries and stage subsets") as c:
        plan = default_plan()
        assert plan.boundaries == [20_000, 50_000, 115_000]
        corpus = reference_manifest(per_cell=3)
        s0, s1, s2 = materialize(plan, corpus)
        assert set(s0.ids()) <= set(s1.ids()) <= set(s2.ids())
        assert set(s1.pairs()) == {(spk, Emotion.NEUTRAL) for spk in SPEAKERS}
        assert len(s1.pairs()) == 11
        c.detail = f"stage sizes {len(s0)}/{len(s1)}/{len(s2)}"


def test_criterion_09_stats():
    with criterion(9, "corpus hours table totals") as c:
        st = compute_stats(reference_manifest())
        assert str(st.hours()) == "111.70"
        assert str(st.hours("kss-f")) == "12.59"
        c.detail = "grand total 111.70 h, kss-f 12.59 h"


def _synthetic_corpus(root, n=20):
    rng = np.random.default_rng(42)
    (root / "wav").mkdir(parents=True)
    rows = []
    for i in range(n):
        rate = (16000, 22050, 44100, 48000)[i % 4]
        lead, speech, tail = rng.uniform(0.2, 0.8), rng.uniform(0.6, 1.5), rng.uniform(0.2, 0.8)
        x = np.concatenate([rng.normal(0, 1e-3, int(lead * rate)), multitone(speech, rate, 0.4),
                            rng.normal(0, 1e-3, int(tail * rate))])
        write_wav(AudioBuffer(np.clip(x, -1, 1), rate), root / "wav" / f"utt{i:02d}.wav")
        rows.append({"id": f"utt{i:02d}", "audio": f"wav/utt{i:02d}.wav", "text": "반갑습니다.",
                     "speaker": SPEAKERS[i % 5], "emotion": Emotion(i % 7).label})
    (root / "manifest.jsonl").write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows),
                                         encoding="utf-8")
    return root / "manifest.jsonl"


def _tree(directory):
    return {p.relative_to(directory).as_posix(): p.read_bytes() for p in sorted(directory.rglob("*")) if p.is_file()}


def test_criterion_10_end_to_end_determinism(tmp_path):
    with criterion(10, "prep + mel byte-identical across runs and worker counts") as c:
        t0 = time.perf_counter()
        manifest = _synthetic_corpus(tmp_path / "corpus")
        trees = []
        for run, workers in enumerate((1, 1, 8)):
            out = tmp_path / f"run{run}"
            assert main(["prep", "--manifest", str(manifest), "--out", str(out), "--workers", str(workers)]) == 0
            assert main(["mel", "--manifest", str(out / "manifest.jsonl"), "--out", str(out),
                         "--workers", str(workers)]) == 0
            trees.append(_tree(out))
        assert len([k for k in trees[0] if k.endswith(".mel")]) == 20
        assert trees[0] == trees[1] == trees[2]
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0
        c.detail = f"{len(trees[0])} files identical; {elapsed:.1f}s"
