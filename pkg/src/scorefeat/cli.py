"""Command-line entry point: ``scorefeat <subcommand> ...``.

Data goes to files under ``--out``; diagnostics go to stderr. Every
subcommand exits 0 iff no fatal error occurred.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path

from .aligner import align, slice_sequence
from .augmenter import (
    AugmentationSpec,
    augment,
    augmentation_grid,
    grid_specs,
    note_pitch_histogram,
    pitch_change_histogram,
)
from .config import ConfigError, PipelineConfig, build_config
from .embedder import (
    build_feature_matrix,
    compute_duration_stats,
    load_stats,
    save_stats,
    write_features,
    write_features_csv,
)
from .lexicon import (
    LexiconError,
    default_inventory,
    default_lexicon,
    load_inventory,
    load_lexicon,
    phonemize,
)
from .mushra import MushraError, all_pairs_report, load_responses
from .score import ScoreError, load_score, validate_score, write_musicxml
from .splitter import chunk_for_mushra, make_split, segment_score

SCORE_SUFFIXES = (".xml", ".musicxml", ".mxl")


class CommandError(Exception):
    """Fatal error for the running subcommand."""


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write_jsonl(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(_dumps(r) + "\n" for r in rows), encoding="utf-8")


def score_files(paths) -> list[Path]:
    found = []
    for p in map(Path, paths):
        if p.is_dir():
            found += sorted(f for f in p.iterdir() if f.suffix.lower() in SCORE_SUFFIXES and f.is_file())
        elif p.exists():
            found.append(p)
        else:
            raise CommandError(f"{p}: no such file or directory")
    return found


@lru_cache(maxsize=None)
def _resources(inventory_path, lexicon_path, strict):
    if inventory_path is None:
        inventory = default_inventory(strict)
    else:
        inventory = load_inventory(Path(inventory_path).read_bytes(), strict)
    if lexicon_path is None:
        lexicon = default_lexicon(inventory)
    else:
        lexicon = load_lexicon(Path(lexicon_path).read_bytes(), inventory)
    return inventory, lexicon


def resources(cfg: PipelineConfig):
    return _resources(cfg.inventory and str(cfg.inventory), cfg.lexicon and str(cfg.lexicon),
                      cfg.strict_inventory)


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _corpus_files(cfg: PipelineConfig) -> list[Path]:
    if cfg.corpus is None:
        raise CommandError("no corpus directory given (--corpus or corpus = ... in the config)")
    files = score_files([cfg.corpus])
    if not files:
        raise CommandError(f"{cfg.corpus}: no input scores")
    return files


# ---------------------------------------------------------------------------
# parse-check


def _check_one(path: Path):
    try:
        score = load_score(path)
    except (ScoreError, ValueError) as exc:
        return path, None, str(exc)
    return path, validate_score(score), None


def cmd_parse_check(args, cfg: PipelineConfig) -> int:
    files = score_files(args.paths)
    if not files:
        _err("no input scores")
        return 1
    fatal = False
    for path, findings, error in _map(_check_one, files, cfg.jobs):
        if error is not None:
            _err(f"ERROR {path}: {error}")
            fatal = True
            continue
        errors = [f for f in findings if f.severity == "error"]
        for f in findings:
            _err(f"{f.severity.upper()} {path}: {f.location}: {f.message}")
        if errors:
            fatal = True
        else:
            _err(f"OK {path}")
    return 1 if fatal else 0


# ---------------------------------------------------------------------------
# phonemize


def cmd_phonemize(args, cfg: PipelineConfig) -> int:
    _, lexicon = resources(cfg)
    words = args.words
    if args.text is not None:
        words = words + Path(args.text).read_text(encoding="utf-8").split()
    if not words:
        _err("no words given")
        return 1
    prons = phonemize(words, lexicon)
    lines = "".join(f"{w}\t{' '.join(p)}\n" for w, p in zip(words, prons))
    if args.out_file:
        Path(args.out_file).write_text(lines, encoding="utf-8")
    else:
        sys.stdout.write(lines)
    return 0


# ---------------------------------------------------------------------------
# split


def _load_corpus(cfg: PipelineConfig):
    scores, fatal = [], False
    for path in _corpus_files(cfg):
        try:
            scores.append(load_score(path))
        except (ScoreError, ValueError) as exc:
            _err(f"ERROR {path}: {exc}")
            fatal = True
    return scores, fatal


def cmd_split(args, cfg: PipelineConfig) -> int:
    scores, fatal = _load_corpus(cfg)
    by_id = {s.score_id: s for s in scores}
    segments = [seg for s in scores for seg in segment_score(s, cfg.segment_min_s, cfg.segment_max_s)]
    result = make_split(segments, cfg.test_target_s, cfg.seed)

    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "split.json").write_text(result.manifest_json() + "\n", encoding="utf-8")
    assignment = result.assignment()
    _write_jsonl(cfg.out / "segments.jsonl", (
        {"segment_id": s.segment_id, "score_id": s.score_id, "start": s.start, "end": s.end,
         "duration_seconds": round(s.duration_seconds, 6), "split": assignment[s.segment_id]}
        for s in segments))

    chunks = []
    for seg in result.test:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            chunks += chunk_for_mushra(seg, by_id[seg.score_id], cfg.mushra_max_s)
        for w in caught:
            _err(f"WARNING {w.message}")
    _write_jsonl(cfg.out / "mushra_chunks.jsonl", (
        {"chunk_id": c.chunk_id, "score_id": c.score_id, "start": c.start, "end": c.end,
         "duration_seconds": round(c.duration_seconds, 6), "over_length": c.over_length}
        for c in chunks))
    _err(f"split: {len(result.train)} train / {len(result.test)} test segments, "
         f"{len(result.excluded_from_test)} leaking pair(s)")
    return 1 if fatal else 0


# ---------------------------------------------------------------------------
# stats / features


def _read_split(cfg: PipelineConfig, split_path) -> dict[str, list[tuple[str, int, int, str]]]:
    """score_id -> [(segment_id, start, end, split)] from a split manifest."""
    path = Path(split_path) if split_path else cfg.out / "split.json"
    if not path.is_file():
        raise CommandError(f"split manifest not found: {path} (run `scorefeat split` first)")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    plan: dict[str, list] = {}
    for split in ("train", "test"):
        for seg_id in manifest[split]:
            score_id, span = seg_id.rsplit("#", 1)
            start, end = (int(x) for x in span.split("-"))
            plan.setdefault(score_id, []).append((seg_id, start, end, split))
    for segs in plan.values():
        segs.sort(key=lambda s: s[1])
    return plan


def _align_job(job):
    """Align every requested variant of one score and slice out its segments."""
    path, segs, cfg, specs = job
    inventory, lexicon = resources(cfg)
    try:
        score = load_score(path)
        out = []
        for spec in specs:
            wanted = [s for s in segs if s[3] == "train" or spec.is_identity]
            if not wanted:
                continue
            try:
                variant = augment(score, spec, cfg.octave_range)
            except ValueError as exc:
                if spec.is_identity:
                    raise
                out.append(("skip", spec, str(exc)))
                continue
            seq = align(variant, lexicon, inventory, cfg.octave_range)
            for seg_id, start, end, split in wanted:
                out.append(("ok", spec, (seg_id, split, slice_sequence(seq, start, end, seg_id))))
        return path, out, None
    except (ScoreError, LexiconError, ValueError) as exc:
        return path, None, f"{type(exc).__name__}: {exc}"


def _aligned_segments(cfg: PipelineConfig, split_path, train_only=False):
    plan = _read_split(cfg, split_path)
    files = {p.stem: p for p in _corpus_files(cfg)}
    specs = grid_specs(cfg.semitones, cfg.tempo_factors)
    if not any(s.is_identity for s in specs):
        specs.insert(0, AugmentationSpec(0, 1.0))
    jobs, fatal = [], False
    for score_id in sorted(plan):
        if score_id not in files:
            _err(f"ERROR split manifest names score {score_id!r}, not found in {cfg.corpus}")
            fatal = True
            continue
        segs = [s for s in plan[score_id] if not train_only or s[3] == "train"]
        if segs:
            jobs.append((files[score_id], segs, cfg, specs))
    results = []
    for path, out, error in _map(_align_job, jobs, cfg.jobs):
        if error is not None:
            _err(f"ERROR {path}: {error}")
            fatal = True
            continue
        for status, spec, payload in out:
            if status == "skip":
                _err(f"WARNING {path}: variant {spec.variant_id} skipped: {payload}")
            else:
                results.append((spec, *payload))
    return results, fatal


def cmd_stats(args, cfg: PipelineConfig) -> int:
    results, fatal = _aligned_segments(cfg, args.split, train_only=True)
    if not results:
        _err("no training segments could be aligned")
        return 1
    stats = compute_duration_stats(seq for _, _, _, seq in results)
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_stats(stats, cfg.out / "stats.json")
    _err(f"stats: mean {stats.mean:.6f} s, std {stats.std:.6f} s over {stats.n} tokens")
    return 1 if fatal else 0


def _safe(segment_id: str) -> str:
    return segment_id.replace("#", "__").replace("/", "_")


def cmd_features(args, cfg: PipelineConfig) -> int:
    if args.stats_in is not None and not Path(args.stats_in).is_file():
        _err(f"ERROR stats file not found: {args.stats_in}")
        return 1
    results, fatal = _aligned_segments(cfg, args.split)
    inventory, _ = resources(cfg)
    if args.stats_in is not None:
        stats = load_stats(args.stats_in)
    else:
        train = [seq for _, _, split, seq in results if split == "train"]
        if not train:
            _err("ERROR no training segments to compute duration statistics from")
            return 1
        stats = compute_duration_stats(train)
        cfg.out.mkdir(parents=True, exist_ok=True)
        save_stats(stats, cfg.out / "stats.json")

    feat_dir = cfg.out / "features"
    feat_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for spec, seg_id, split, seq in sorted(results, key=lambda r: (r[1], r[0].semitones, r[0].tempo_factor)):
        matrix = build_feature_matrix(seq, stats, inventory)
        name = f"{_safe(seg_id)}__{spec.variant_id}"
        rel = Path("features") / f"{name}.utf1"
        write_features(matrix, cfg.out / rel)
        entry = {"segment_id": seg_id, "score_id": seg_id.rsplit("#", 1)[0], "split": split,
                 "variant_id": spec.variant_id, "semitones": spec.semitones,
                 "tempo_factor": spec.tempo_factor, "rows": matrix.shape[0],
                 "cols": matrix.shape[1], "output_path": rel.as_posix()}
        if args.csv:
            csv_rel = Path("features") / f"{name}.csv"
            write_features_csv(matrix, cfg.out / csv_rel, inventory, cfg.octave_min)
            entry["csv_path"] = csv_rel.as_posix()
        manifest.append(entry)
    _write_jsonl(cfg.out / "features.jsonl", manifest)
    _err(f"features: wrote {len(manifest)} matrices")
    return 1 if fatal else 0


# ---------------------------------------------------------------------------
# augment


def cmd_augment(args, cfg: PipelineConfig) -> int:
    paths = args.paths or ([cfg.corpus] if cfg.corpus else [])
    files = score_files(paths)
    if not files:
        _err("no input scores")
        return 1
    fatal = False
    manifest, originals, augmented = [], [], []
    for path in files:
        try:
            score = load_score(path)
            grid = augmentation_grid(score, cfg.semitones, cfg.tempo_factors, cfg.octave_range)
        except (ScoreError, ValueError) as exc:
            _err(f"ERROR {path}: {exc}")
            fatal = True
            continue
        originals.append(score)
        for spec, message in grid.errors:
            _err(f"WARNING {path}: variant {spec.variant_id}: {message}")
        for spec, variant in grid:
            rel = Path("augment") / score.score_id / f"{spec.variant_id}.musicxml"
            (cfg.out / rel).parent.mkdir(parents=True, exist_ok=True)
            (cfg.out / rel).write_bytes(write_musicxml(variant))
            augmented.append(variant)
            manifest.append({"source_id": score.score_id, "variant_id": spec.variant_id,
                             "semitones": spec.semitones, "tempo_factor": spec.tempo_factor,
                             "output_path": rel.as_posix()})
    _write_jsonl(cfg.out / "augment.jsonl", manifest)
    if originals:
        hist_dir = cfg.out / "augment"
        pitch_change_histogram(originals).write_csv(hist_dir / "intervals_original.csv")
        pitch_change_histogram(augmented).write_csv(hist_dir / "intervals_augmented.csv")
        note_pitch_histogram(originals).write_csv(hist_dir / "pitches_original.csv", key="pitch")
        note_pitch_histogram(augmented).write_csv(hist_dir / "pitches_augmented.csv", key="pitch")
    _err(f"augment: {len(manifest)} variants from {len(originals)} score(s)")
    return 1 if fatal else 0


# ---------------------------------------------------------------------------
# mushra-report


def cmd_mushra_report(args, cfg: PipelineConfig) -> int:
    path = Path(args.responses)
    if not path.is_file():
        _err(f"ERROR responses file not found: {path}")
        return 1
    responses = load_responses(path.read_bytes())
    report = all_pairs_report(responses, args.systems or None, args.alpha)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "mushra_report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (cfg.out / "mushra_report.csv").write_text(report.to_csv(), encoding="utf-8")
    (cfg.out / "mushra_scores.json").write_text(report.raw_json() + "\n", encoding="utf-8")
    for s in report.summaries:
        _err(f"{s.system_id}: n={s.n} mean={s.mean:.2f} q1={s.q1:.2f} q2={s.q2:.2f} q3={s.q3:.2f}")
    for t in report.tests:
        flag = " *" if report.flagged(t) else ""
        _err(f"{t.system_a} vs {t.system_b}: t={t.t_statistic:.3f} df={t.degrees_of_freedom:.1f} "
             f"p={t.p_value:.3g}{flag}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--strict-inventory", dest="strict_inventory", default=None,
                        action=argparse.BooleanOptionalAction,
                        help="require exactly 84 inventory tokens (default on)")
    common.add_argument("--lexicon", help="pronunciation lexicon file")
    common.add_argument("--inventory", help="phoneme inventory file")
    common.add_argument("--corpus", help="directory of MusicXML scores")

    parser = argparse.ArgumentParser(prog="scorefeat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-check", parents=[common], help="parse and validate scores")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_parse_check)

    p = sub.add_parser("phonemize", parents=[common], help="look up word pronunciations")
    p.add_argument("words", nargs="*")
    p.add_argument("--text", help="file of whitespace-separated words")
    p.add_argument("--out-file", help="write pronunciations here instead of stdout")
    p.set_defaults(func=cmd_phonemize)

    p = sub.add_parser("split", parents=[common], help="segment the corpus and pick a leak-free test set")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", parents=[common], help="duration statistics over the training split")
    p.add_argument("--split", help="split manifest (default: OUT/split.json)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("features", parents=[common], help="write feature matrices")
    p.add_argument("--split", help="split manifest (default: OUT/split.json)")
    p.add_argument("--stats-in", help="reuse this stats file instead of computing one")
    p.add_argument("--csv", action="store_true", help="also export CSV next to each matrix")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("augment", parents=[common], help="write the transposition x tempo grid")
    p.add_argument("paths", nargs="*")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("mushra-report", parents=[common], help="summaries and pairwise Welch tests")
    p.add_argument("responses", help="CSV with listener_id,chunk_id,system_id,score")
    p.add_argument("--systems", nargs="*", help="restrict to these systems")
    p.add_argument("--alpha", type=float, default=0.001)
    p.set_defaults(func=cmd_mushra_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in
                 ("out", "seed", "jobs", "strict_inventory", "lexicon", "inventory", "corpus")}
    try:
        cfg = build_config(args.config, overrides).validate()
        return args.func(args, cfg)
    except (CommandError, ConfigError, ScoreError, LexiconError, MushraError, ValueError) as exc:
        _err(f"ERROR {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
