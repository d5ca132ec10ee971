"""``emoprep`` command line.

Exit codes: 0 success, 1 partial failure (some items failed or the
validation report lists problems), 2 invalid invocation or unreadable input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .audio_io import TARGET_RATE, read_wav, resample, write_wav
from .config import PipelineConfig, load_config
from .curriculum import default_plan, materialize
from .dataset import (
    NO_SPEECH, Emotion, compute_stats, dump_manifest, export_conditioning_spec, load_manifest,
    validate_for_training,
)
from .errors import PipelineError
from .features import mel_sidecar, mel_spectrogram, write_mel, write_sidecar
from .sampler import build_sampler, vocoder_eligible
from .text_frontend import SymbolTable, text_to_graphemes
from .vad import remove_silence

log = logging.getLogger("emoprep")

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]")


class UsageError(Exception):
    pass


def safe_name(utt_id: str) -> str:
    """Filesystem-safe stem that stays unique for ids needing escaping."""
    name = _UNSAFE.sub("_", utt_id)
    if name != utt_id or name.startswith("."):
        name = f"{name}-{hashlib.sha1(utt_id.encode()).hexdigest()[:8]}"
    return name


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def provenance(cfg: PipelineConfig, input_hash: str) -> dict:
    return {"tool": "emoprep", "version": __version__, "config_hash": cfg.config_hash(), "input_sha256": input_hash}


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _resolve_audio(audio: str, base: Path) -> Path:
    p = Path(audio)
    return p if p.is_absolute() else base / p


def _rel(path: Path, out: Path) -> str:
    return os.path.relpath(path, out)


def _run(fn, jobs, workers):
    # map preserves input order, so results never depend on scheduling
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _report_failures(failures, out: Path, name: str) -> int:
    write_json({"failures": failures}, out / name)
    for f in failures:
        log.error("%s: %s", f["id"], f["error"])
    return EXIT_PARTIAL if failures else EXIT_OK


# ------------------------------------------------------------------- prep

def _prep_one(job):
    utt, src, dst, cfg = job
    try:
        buf = read_wav(src)
        trimmed = remove_silence(buf, cfg.vad)
        out = resample(trimmed.audio, TARGET_RATE)
        write_wav(out, dst)
        meta = provenance(cfg, sha256_file(src))
        meta.update(
            sample_rate=TARGET_RATE,
            source_sample_rate=buf.sample_rate,
            segments=[[s.start_s, s.end_s] for s in trimmed.segments],
            no_speech=trimmed.no_speech,
        )
        write_json(meta, dst.with_suffix(".json"))
        return {"ok": True, "n_samples": len(out), "no_speech": trimmed.no_speech}
    except (PipelineError, OSError) as exc:
        return {"ok": False, "error": f"{type(exc).__name__}: {exc}"}


def cmd_prep(cfg: PipelineConfig) -> int:
    corpus = load_manifest(cfg.manifest)
    base = cfg.manifest.parent
    audio_dir = cfg.out / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    jobs, skipped = [], {}
    for u in corpus:
        src = _resolve_audio(u.audio, base)
        if u.no_speech:
            skipped[u.id] = replace(u, audio=_rel(src, cfg.out))
            continue
        jobs.append((u, src, audio_dir / f"{safe_name(u.id)}.wav", cfg))

    results = dict(zip((j[0].id for j in jobs), _run(_prep_one, jobs, cfg.workers)))
    updated, failures = [], []
    dst_of = {j[0].id: j[2] for j in jobs}
    for u in corpus:
        if u.id in skipped:
            updated.append(skipped[u.id])
            continue
        r = results[u.id]
        if not r["ok"]:
            failures.append({"id": u.id, "audio": u.audio, "error": r["error"]})
            continue
        flags = tuple(f for f in u.flags if f != NO_SPEECH) + ((NO_SPEECH,) if r["no_speech"] else ())
        updated.append(replace(u, audio=_rel(dst_of[u.id], cfg.out), duration_s=r["n_samples"] / TARGET_RATE,
                               n_mel_frames=None, flags=flags))
    (cfg.out / "manifest.jsonl").write_text(dump_manifest(corpus.replace_utterances(updated)), encoding="utf-8")
    log.info("prep: %d processed, %d skipped, %d failed", len(jobs) - len(failures), len(skipped), len(failures))
    return _report_failures(failures, cfg.out, "prep_failures.json")


# -------------------------------------------------------------------- mel

def _mel_one(job):
    src, dst, cfg = job
    try:
        spec = mel_spectrogram(read_wav(src), cfg.stft, cfg.mel)
        write_mel(spec, dst)
        meta = mel_sidecar(cfg.stft, cfg.mel, src)
        meta.update(provenance(cfg, meta["source_sha256"]), n_mels=spec.n_mels, n_frames=spec.n_frames)
        write_sidecar(meta, dst.with_suffix(".json"))
        return {"ok": True, "n_frames": spec.n_frames}
    except (PipelineError, OSError) as exc:
        return {"ok": False, "error": f"{type(exc).__name__}: {exc}"}


def cmd_mel(cfg: PipelineConfig) -> int:
    corpus = load_manifest(cfg.manifest)
    base = cfg.manifest.parent
    mel_dir = cfg.out / "mel"
    mel_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(_resolve_audio(u.audio, base), mel_dir / f"{safe_name(u.id)}.mel", cfg) for u in corpus]
    results = _run(_mel_one, jobs, cfg.workers)

    updated, failures = [], []
    for u, (src, _, _), r in zip(corpus, jobs, results):
        if not r["ok"]:
            failures.append({"id": u.id, "audio": u.audio, "error": r["error"]})
            continue
        updated.append(replace(u, audio=_rel(src, cfg.out), n_mel_frames=r["n_frames"]))
    (cfg.out / "manifest.jsonl").write_text(dump_manifest(corpus.replace_utterances(updated)), encoding="utf-8")
    log.info("mel: %d written, %d failed", len(updated), len(failures))
    return _report_failures(failures, cfg.out, "mel_failures.json")


# ------------------------------------------------------------ thin wrappers

def cmd_text(cfg: PipelineConfig) -> int:
    corpus = load_manifest(cfg.manifest)
    cfg.out.mkdir(parents=True, exist_ok=True)
    table = SymbolTable()
    table.save(cfg.out / "symbols.json")
    lines, failures = [], []
    for u in corpus:
        try:
            seq = text_to_graphemes(u.text, table)
        except PipelineError as exc:
            failures.append({"id": u.id, "error": f"{type(exc).__name__}: {exc}"})
            continue
        lines.append(json.dumps({"id": u.id, "ids": list(seq.ids)}) + "\n")
    (cfg.out / "graphemes.jsonl").write_text("".join(lines), encoding="utf-8")
    print(f"{len(lines)} transcripts encoded over {len(table)} symbols, {len(failures)} rejected")
    return _report_failures(failures, cfg.out, "text_failures.json")


def cmd_stats(cfg: PipelineConfig) -> int:
    corpus = load_manifest(cfg.manifest)
    cfg.out.mkdir(parents=True, exist_ok=True)
    stats = compute_stats(corpus)
    write_json(stats.to_dict(), cfg.out / "stats.json")
    table = stats.render()
    (cfg.out / "stats.txt").write_text(table + "\n", encoding="utf-8")
    if corpus.speakers:
        (cfg.out / "conditioning.json").write_text(export_conditioning_spec(corpus).to_json(), encoding="utf-8")
    print(table)
    return EXIT_OK


def cmd_plan(cfg: PipelineConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    plan = default_plan(cfg.first_speaker, cfg.clip)
    (cfg.out / "plan.json").write_text(plan.to_json(), encoding="utf-8")
    print("stage boundaries:", " / ".join(f"{b:,}" for b in plan.boundaries))
    if cfg.manifest is not None:
        corpus = load_manifest(cfg.manifest)
        for n, sub in enumerate(materialize(plan, corpus)):
            (cfg.out / f"stage{n}.jsonl").write_text(dump_manifest(sub), encoding="utf-8")
            print(f"stage{n}: {len(sub)} utterances, {len(sub.pairs())} speaker-emotion pairs")
    return EXIT_OK


def cmd_sample(cfg: PipelineConfig, mode: str = "acoustic") -> int:
    corpus = load_manifest(cfg.manifest)
    cfg.out.mkdir(parents=True, exist_ok=True)
    if mode == "vocoder":
        corpus = vocoder_eligible(corpus, cfg.clip)
    sampler = build_sampler(corpus, cfg.seed)
    by_id = corpus.by_id()
    lines = []
    for b in range(cfg.batches):
        ids = sampler.next_batch(cfg.batch_size)
        clips = [list(sampler.select_clip(by_id[i], cfg.clip)) for i in ids] if mode == "vocoder" else None
        lines.append(json.dumps({"batch": b, "ids": ids, "clips": clips}) + "\n")
    (cfg.out / "batches.jsonl").write_text("".join(lines), encoding="utf-8")
    meta = provenance(cfg, sha256_file(cfg.manifest))
    meta.update(sampler.provenance(), mode=mode, pairs=[[s, e.label] for s, e in sampler.pairs])
    write_json(meta, cfg.out / "batches.json")
    print(f"{cfg.batches} batches of {cfg.batch_size} over {len(sampler.pairs)} pairs ({mode})")
    return EXIT_OK


def cmd_validate(cfg: PipelineConfig, require=None) -> int:
    corpus = load_manifest(cfg.manifest)
    if require is None:
        pairs = [(s, e) for s in corpus.speakers for e in Emotion]
    else:
        pairs = [(s, Emotion.parse(e)) for s, e in json.loads(Path(require).read_text(encoding="utf-8"))]
    report = validate_for_training(corpus, pairs, cfg.clip.clip_frames)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        write_json(report.to_dict(), cfg.out / "validation.json")
    for p in report.problems:
        print(p)
    print("ok" if report.ok else f"{len(report.problems)} problems")
    return EXIT_OK if report.ok else EXIT_PARTIAL


# ------------------------------------------------------------------ parser

COMMANDS = ("prep", "mel", "text", "stats", "plan", "sample", "validate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emoprep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"emoprep {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI run configuration")
    common.add_argument("--manifest", type=Path, help="input JSONL manifest")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="sampler seed")
    common.add_argument("--workers", type=int, help="parallel processes for prep and mel")
    common.add_argument("--aggressiveness", type=int, choices=range(4), help="VAD level, 3 trims most")
    common.add_argument("--clip-frames", type=int, help="vocoder clip length in frames")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("prep", parents=[common], help="silence removal and resampling to 22,050 Hz")
    sub.add_parser("mel", parents=[common], help="log-mel spectrograms (MEL1 files)")
    sub.add_parser("text", parents=[common], help="grapheme ID sequences")
    sub.add_parser("stats", parents=[common], help="hours per speaker and emotion")
    sub.add_parser("plan", parents=[common], help="curriculum plan and per-stage manifests")
    p = sub.add_parser("sample", parents=[common], help="balanced batches as JSONL")
    p.add_argument("--mode", choices=("acoustic", "vocoder"), default="acoustic")
    p.add_argument("--batches", type=int, help="number of batches to write")
    p.add_argument("--batch-size", type=int, help="utterances per batch")
    p = sub.add_parser("validate", parents=[common], help="training readiness report")
    p.add_argument("--require", type=Path, help="JSON list of [speaker, emotion] pairs (default: full grid)")
    return parser


def resolve_config(args) -> PipelineConfig:
    cfg = load_config(args.config)
    updates = {k: v for k, v in {
        "manifest": args.manifest, "out": args.out, "seed": args.seed, "workers": args.workers,
        "batches": getattr(args, "batches", None), "batch_size": getattr(args, "batch_size", None),
    }.items() if v is not None}
    if args.aggressiveness is not None:
        updates["vad"] = replace(cfg.vad, aggressiveness=args.aggressiveness)
    if args.clip_frames is not None:
        updates["clip"] = replace(cfg.clip, clip_frames=args.clip_frames)
    cfg = replace(cfg, **updates)

    needs_manifest = args.command != "plan"
    needs_out = args.command != "validate"
    if needs_manifest and cfg.manifest is None:
        raise UsageError(f"{args.command} needs --manifest (or [pipeline] manifest in the config)")
    if cfg.manifest is not None and not Path(cfg.manifest).is_file():
        raise UsageError(f"manifest {cfg.manifest} does not exist")
    if needs_out and cfg.out is None:
        raise UsageError(f"{args.command} needs --out (or [pipeline] out in the config)")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "sample":
            return cmd_sample(cfg, args.mode)
        if args.command == "validate":
            return cmd_validate(cfg, args.require)
        return {"prep": cmd_prep, "mel": cmd_mel, "text": cmd_text, "stats": cmd_stats,
                "plan": cmd_plan}[args.command](cfg)
    except (UsageError, PipelineError, ValueError, OSError) as exc:
        print(f"emoprep {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
