"""Song segmentation, leakage-safe train/test selection and MUSHRA chunking.

Two segments leak into each other when they share a contiguous run of at
least three identical pitches (octave-sensitive; rests and durations are
ignored). A segment that leaks with any other segment is never put in the
test set.
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from .aligner import score_seconds
from .score import Score

_EPS = 1e-9


class InfeasibleSplitError(ValueError):
    def __init__(self, message: str, shortfall: float):
        super().__init__(message)
        self.shortfall = shortfall


@dataclass(frozen=True)
class Segment:
    score_id: str
    start: int
    end: int
    duration_seconds: float
    pitch_sequence: tuple[int, ...]

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("segment span must be nonempty")

    @property
    def segment_id(self) -> str:
        return f"{self.score_id}#{self.start}-{self.end}"

    @property
    def note_span(self) -> range:
        return range(self.start, self.end)


@dataclass(frozen=True)
class Chunk:
    score_id: str
    start: int
    end: int
    duration_seconds: float
    over_length: bool = False

    @property
    def chunk_id(self) -> str:
        return f"{self.score_id}#{self.start}-{self.end}"


@dataclass(frozen=True)
class LeakEvidence:
    a: str
    b: str
    run: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "run": list(self.run), "len": len(self.run)}


@dataclass
class SplitResult:
    train: list[Segment]
    test: list[Segment]
    excluded_from_test: list[LeakEvidence] = field(default_factory=list)
    seed: int | None = None
    test_target_s: float = 300.0

    def assignment(self) -> dict[str, str]:
        out = {s.segment_id: "train" for s in self.train}
        out.update({s.segment_id: "test" for s in self.test})
        return out

    def to_manifest(self) -> dict:
        return {
            "seed": self.seed,
            "test_target_s": self.test_target_s,
            "train": [s.segment_id for s in self.train],
            "test": [s.segment_id for s in self.test],
            "evidence": [e.to_dict() for e in self.excluded_from_test],
        }

    def manifest_json(self) -> str:
        return json.dumps(self.to_manifest(), sort_keys=True, separators=(",", ":"))


def make_segment(score: Score, start: int, end: int, seconds: Sequence[float] | None = None) -> Segment:
    if seconds is None:
        seconds = score_seconds(score)
    notes = score.notes[start:end]
    return Segment(
        score.score_id, start, end, float(sum(seconds[start:end])),
        tuple(n.pitch.chromatic for n in notes if not n.is_rest),
    )


def segment_score(score: Score, min_s: float = 20.0, max_s: float = 30.0) -> list[Segment]:
    """Greedy cut into roughly ``min_s``-``max_s`` second segments.

    Once a segment holds at least ``min_s`` seconds it is closed before the
    next rest. If it would pass ``max_s`` first, it is cut at whichever note
    boundary lies nearest ``max_s``. A final remainder shorter than
    ``min_s / 2`` joins the previous segment. Segments tile the score.
    """
    if not min_s < max_s:
        raise ValueError("min_s must be smaller than max_s")
    secs = score_seconds(score)
    n = len(secs)
    if n == 0:
        return []
    bounds = [0]
    seg_start, elapsed = 0, 0.0
    for i, note in enumerate(score.notes):
        if i > seg_start and note.is_rest and elapsed >= min_s - _EPS:
            bounds.append(i)
            seg_start, elapsed = i, 0.0
        grown = elapsed + secs[i]
        if grown > max_s + _EPS:
            if i > seg_start and abs(elapsed - max_s) <= abs(grown - max_s):
                bounds.append(i)
                seg_start, elapsed = i, secs[i]
            elif i + 1 < n:
                bounds.append(i + 1)
                seg_start, elapsed = i + 1, 0.0
            else:
                elapsed = grown
            continue
        elapsed = grown
    bounds.append(n)

    if len(bounds) > 2 and sum(secs[bounds[-2]:]) < min_s / 2:
        del bounds[-2]
    return [make_segment(score, a, b, secs) for a, b in zip(bounds, bounds[1:])]


def _pitches(x) -> tuple[int, ...]:
    return tuple(x.pitch_sequence) if isinstance(x, Segment) else tuple(x)


def _ngrams(seq: tuple[int, ...], n: int) -> set[tuple[int, ...]]:
    return {seq[i:i + n] for i in range(len(seq) - n + 1)}


def shared_pitch_run(a, b, min_len: int = 3) -> tuple[int, ...] | None:
    """Longest common contiguous pitch run of two segments, if ``>= min_len``."""
    pa, pb = _pitches(a), _pitches(b)
    if len(pa) < min_len or len(pb) < min_len or not (_ngrams(pa, min_len) & _ngrams(pb, min_len)):
        return None
    best_len, best_end = 0, 0
    prev = [0] * (len(pb) + 1)
    for i in range(1, len(pa) + 1):
        cur = [0] * (len(pb) + 1)
        for j in range(1, len(pb) + 1):
            if pa[i - 1] == pb[j - 1]:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best_len:
                    best_len, best_end = cur[j], i
        prev = cur
    return pa[best_end - best_len:best_end] if best_len >= min_len else None


def find_leaks(segments: Sequence[Segment], min_len: int = 3) -> list[tuple[int, int, tuple[int, ...]]]:
    """Every segment pair (by index, i < j) sharing a qualifying pitch run."""
    grams = [_ngrams(s.pitch_sequence, min_len) for s in segments]
    leaks = []
    for i in range(len(segments)):
        for j in range(i + 1, len(segments)):
            if grams[i] & grams[j]:
                run = shared_pitch_run(segments[i], segments[j], min_len)
                if run is not None:
                    leaks.append((i, j, run))
    return leaks


def make_split(segments: Sequence[Segment], test_target_s: float = 300.0, seed: int = 0,
               min_run: int = 3) -> SplitResult:
    """Random test selection among segments that leak with no other segment.

    Test segments are drawn (seeded) until their total first reaches
    ``test_target_s``; everything else is training data.
    """
    ids = [s.segment_id for s in segments]
    if len(set(ids)) != len(ids):
        raise ValueError("segment ids must be unique")
    total = sum(s.duration_seconds for s in segments)
    if total <= test_target_s:
        raise InfeasibleSplitError(
            f"corpus holds {total:.3f} s, not more than the {test_target_s} s test target",
            test_target_s - total)

    leaks = find_leaks(segments, min_run)
    tainted = {i for i, _, _ in leaks} | {j for _, j, _ in leaks}
    eligible = [i for i in range(len(segments)) if i not in tainted]
    eligible_total = sum(segments[i].duration_seconds for i in eligible)
    if eligible_total < test_target_s - _EPS:
        shortfall = test_target_s - eligible_total
        raise InfeasibleSplitError(
            f"only {eligible_total:.3f} s of leak-free segments for a {test_target_s} s test set "
            f"(short by {shortfall:.3f} s)", shortfall)

    order = list(eligible)
    random.Random(seed).shuffle(order)
    chosen, acc = set(), 0.0
    for i in order:
        if acc >= test_target_s - _EPS:
            break
        chosen.add(i)
        acc += segments[i].duration_seconds

    evidence = [LeakEvidence(ids[i], ids[j], run) for i, j, run in leaks]
    return SplitResult(
        train=[s for k, s in enumerate(segments) if k not in chosen],
        test=[s for k, s in enumerate(segments) if k in chosen],
        excluded_from_test=evidence,
        seed=seed,
        test_target_s=test_target_s,
    )


def chunk_for_mushra(segment: Segment, score: Score, max_s: float = 10.0) -> list[Chunk]:
    """Cut a segment at rest onsets into the longest chunks not over ``max_s``.

    A stretch with no usable rest comes out as one over-length chunk and a
    warning; notes are never split.
    """
    secs = score_seconds(score)
    start, end = segment.start, segment.end
    cuts = [k for k in range(start + 1, end) if score.notes[k].is_rest]

    def span(a, b):
        return float(sum(secs[a:b]))

    chunks = []
    pos = start
    while pos < end:
        if span(pos, end) <= max_s + _EPS:
            chunks.append(Chunk(segment.score_id, pos, end, span(pos, end)))
            break
        best = None
        for c in cuts:
            if c <= pos:
                continue
            if span(pos, c) <= max_s + _EPS:
                best = c
            else:
                break
        if best is None:
            nxt = next((c for c in cuts if c > pos), end)
            chunk = Chunk(segment.score_id, pos, nxt, span(pos, nxt), over_length=True)
            warnings.warn(f"{chunk.chunk_id}: no rest to cut at; chunk is {chunk.duration_seconds:.2f} s "
                          f"(cap {max_s} s)", stacklevel=2)
            chunks.append(chunk)
            pos = nxt
        else:
            chunks.append(Chunk(segment.score_id, pos, best, span(pos, best)))
            pos = best
    return chunks
