"""Score-level augmentation (transposition x tempo grid) and pitch statistics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator

from .score import DEFAULT_OCTAVE_RANGE, Pitch, Score

DEFAULT_SEMITONES = (-1, 0, 1, 2, 3)
DEFAULT_TEMPO_FACTORS = (0.85, 0.90, 0.95, 1.00, 1.05, 1.10, 1.15)


class RangeError(ValueError):
    pass


@dataclass(frozen=True)
class AugmentationSpec:
    semitones: int
    tempo_factor: float

    @property
    def variant_id(self) -> str:
        return f"s{self.semitones:+d}_t{self.tempo_factor:.2f}"

    @property
    def is_identity(self) -> bool:
        return self.semitones == 0 and self.tempo_factor == 1.0


def transpose(score: Score, semitones: int,
              octave_range: tuple[int, int] = DEFAULT_OCTAVE_RANGE) -> Score:
    lo, hi = octave_range
    notes = []
    for i, note in enumerate(score.notes):
        if note.is_rest:
            notes.append(note)
            continue
        pitch = Pitch.from_chromatic(note.pitch.chromatic + semitones)
        if not lo <= pitch.octave <= hi:
            raise RangeError(
                f"{score.score_id}: note {i} {note.pitch.name} shifted {semitones:+d} gives "
                f"{pitch.name}, outside octaves {lo}-{hi}")
        notes.append(replace(note, pitch=pitch))
    return replace(score, notes=tuple(notes))


def scale_tempo(score: Score, factor: float) -> Score:
    if not factor > 0:
        raise ValueError(f"tempo factor must be positive, got {factor}")
    return replace(score, tempo_map=tuple((onset, qpm * factor) for onset, qpm in score.tempo_map))


def augment(score: Score, spec: AugmentationSpec,
            octave_range: tuple[int, int] = DEFAULT_OCTAVE_RANGE) -> Score:
    return scale_tempo(transpose(score, spec.semitones, octave_range), spec.tempo_factor)


@dataclass
class AugmentationGrid:
    """Successful variants in grid order plus the per-variant failures."""

    variants: list[tuple[AugmentationSpec, Score]] = field(default_factory=list)
    errors: list[tuple[AugmentationSpec, str]] = field(default_factory=list)

    def __iter__(self) -> Iterator[tuple[AugmentationSpec, Score]]:
        return iter(self.variants)

    def __len__(self):
        return len(self.variants)


def grid_specs(semitones: Iterable[int] = DEFAULT_SEMITONES,
               tempo_factors: Iterable[float] = DEFAULT_TEMPO_FACTORS) -> list[AugmentationSpec]:
    factors = list(tempo_factors)
    return [AugmentationSpec(s, f) for s in semitones for f in factors]


def augmentation_grid(
    score: Score,
    semitones: Iterable[int] = DEFAULT_SEMITONES,
    tempo_factors: Iterable[float] = DEFAULT_TEMPO_FACTORS,
    octave_range: tuple[int, int] = DEFAULT_OCTAVE_RANGE,
) -> AugmentationGrid:
    """All transposition x tempo variants, semitones outer, factor inner.

    Out-of-range transpositions are collected in ``errors``; only a failing
    identity variant raises.
    """
    grid = AugmentationGrid()
    for spec in grid_specs(semitones, tempo_factors):
        try:
            grid.variants.append((spec, augment(score, spec, octave_range)))
        except RangeError as exc:
            if spec.is_identity:
                raise
            grid.errors.append((spec, str(exc)))
    return grid


@dataclass
class Histogram:
    bins: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.bins.values())

    @property
    def support(self) -> set[int]:
        return {k for k, v in self.bins.items() if v > 0}

    def to_csv(self, key: str = "interval") -> str:
        rows = [f"{key},count"] + [f"{k},{self.bins[k]}" for k in sorted(self.bins)]
        return "\n".join(rows) + "\n"

    def write_csv(self, path: str | Path, key: str = "interval") -> None:
        Path(path).write_text(self.to_csv(key), encoding="utf-8")


# Alias kept for readability at call sites dealing with intervals.
IntervalHistogram = Histogram


def pitch_change_histogram(corpus: Iterable[Score]) -> Histogram:
    """Signed semitone steps between consecutive pitched notes of each score.

    Rests are skipped, so a pair of notes separated by a rest still counts.
    """
    counts: Counter[int] = Counter()
    for score in corpus:
        pitches = [n.pitch.chromatic for n in score.notes if not n.is_rest]
        counts.update(b - a for a, b in zip(pitches, pitches[1:]))
    return Histogram(dict(counts))


def note_pitch_histogram(corpus: Iterable[Score]) -> Histogram:
    """Counts of chromatic note indices (octave * 12 + step)."""
    counts: Counter[int] = Counter()
    for score in corpus:
        counts.update(n.pitch.chromatic for n in score.notes if not n.is_rest)
    return Histogram(dict(counts))
