"""Five-stream feature matrices and their on-disk formats.

Column layout, for the default 84-token inventory::

    0..83    phoneme one-hot
    84..88   octave one-hot (4 octaves, then rest)
    89..101  step one-hot (12 pitch classes, then rest)
    102      z-scored note duration
    103      position ramp within the note
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable

import numpy as np

from .aligner import (
    N_OCTAVES,
    REST_OCTAVE_CLASS,
    REST_STEP_CLASS,
    START_NOTE_INDEX,
    AlignedSequence,
    step_name,
)
from .lexicon import PhonemeInventory

MAGIC = b"UTF1"
N_OCTAVE_COLUMNS = N_OCTAVES + 1
N_STEP_COLUMNS = REST_STEP_CLASS + 1


class StatsError(ValueError):
    pass


class FeatureFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DurationStats:
    mean: float
    std: float
    n: int | None = None  # None when read back from a feature file

    def __post_init__(self):
        if not self.std > 0:
            raise StatsError(f"duration std must be positive, got {self.std}")
        if self.n is not None and self.n < 2:
            raise StatsError(f"need at least 2 duration samples, got {self.n}")

    def to_json(self) -> str:
        return json.dumps({"mean": self.mean, "std": self.std, "n": self.n}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DurationStats":
        data = json.loads(text)
        n = data.get("n")
        return cls(float(data["mean"]), float(data["std"]), None if n is None else int(n))


def save_stats(stats: DurationStats, path: str | Path) -> None:
    Path(path).write_text(stats.to_json() + "\n", encoding="utf-8")


def load_stats(path: str | Path) -> DurationStats:
    return DurationStats.from_json(Path(path).read_text(encoding="utf-8"))


def compute_duration_stats(corpus: Iterable[AlignedSequence]) -> DurationStats:
    """Population mean/std of token durations over a training corpus.

    Every token occurrence counts (a note's duration is repeated once per
    token sung on it); the ``<s>`` token has no note and is left out.
    """
    durations = np.array(
        [t.context.duration_seconds for seq in corpus for t in seq.tokens
         if t.context.note_index != START_NOTE_INDEX],
        dtype=np.float64,
    )
    if durations.size < 2:
        raise StatsError(f"need at least 2 duration samples, got {durations.size}")
    std = float(durations.std())
    if std == 0.0:
        raise StatsError("all token durations are identical; z-score is undefined")
    return DurationStats(float(durations.mean()), std, int(durations.size))


@dataclass(eq=False)
class FeatureMatrix:
    values: np.ndarray
    score_id: str
    stats: DurationStats
    n_phonemes: int = 84

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def phoneme_block(self) -> np.ndarray:
        return self.values[:, :self.n_phonemes]

    @property
    def octave_block(self) -> np.ndarray:
        a = self.n_phonemes
        return self.values[:, a:a + N_OCTAVE_COLUMNS]

    @property
    def step_block(self) -> np.ndarray:
        a = self.n_phonemes + N_OCTAVE_COLUMNS
        return self.values[:, a:a + N_STEP_COLUMNS]

    @property
    def duration_column(self) -> np.ndarray:
        return self.values[:, -2]

    @property
    def ramp_column(self) -> np.ndarray:
        return self.values[:, -1]

    def durations_seconds(self) -> np.ndarray:
        return self.duration_column.astype(np.float64) * self.stats.std + self.stats.mean

    def __eq__(self, other):
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (self.score_id == other.score_id
                and (self.stats.mean, self.stats.std) == (other.stats.mean, other.stats.std)
                and self.values.dtype == other.values.dtype
                and self.values.shape == other.values.shape
                and self.values.tobytes() == other.values.tobytes())


def n_columns(n_phonemes: int = 84) -> int:
    return n_phonemes + N_OCTAVE_COLUMNS + N_STEP_COLUMNS + 2


def build_feature_matrix(sequence: AlignedSequence, stats: DurationStats,
                         inventory: PhonemeInventory) -> FeatureMatrix:
    if not stats.std > 0:
        raise StatsError("stats std must be positive")
    n_ph = len(inventory)
    oct_off = n_ph
    step_off = oct_off + N_OCTAVE_COLUMNS
    values = np.zeros((len(sequence), n_columns(n_ph)), dtype=np.float32)
    for row, tok in enumerate(sequence.tokens):
        ctx = tok.context
        if not 0 <= tok.token_id < n_ph:
            raise ValueError(f"row {row}: token id {tok.token_id} outside inventory of {n_ph}")
        if not 0 <= ctx.octave_class <= REST_OCTAVE_CLASS or not 0 <= ctx.step_class <= REST_STEP_CLASS:
            raise ValueError(f"row {row}: class index out of range")
        values[row, tok.token_id] = 1.0
        values[row, oct_off + ctx.octave_class] = 1.0
        values[row, step_off + ctx.step_class] = 1.0
        values[row, -2] = (ctx.duration_seconds - stats.mean) / stats.std
        values[row, -1] = tok.ramp
    return FeatureMatrix(values, sequence.score_id, stats, n_ph)


def column_names(inventory: PhonemeInventory, octave_min: int = 2) -> list[str]:
    names = [f"ph:{t}" for t in inventory.tokens]
    names += [f"oct:{octave_min + k}" for k in range(N_OCTAVES)] + ["oct:rest"]
    names += [f"step:{step_name(k)}" for k in range(N_STEP_COLUMNS)]
    return names + ["duration_z", "ramp"]


# ---------------------------------------------------------------------------
# Binary format: b"UTF1", u32 LE header length, JSON header, f32 LE row-major


def _header(matrix: FeatureMatrix) -> bytes:
    rows, cols = matrix.values.shape
    header = {"rows": rows, "cols": cols, "score_id": matrix.score_id,
              "stats": {"mean": matrix.stats.mean, "std": matrix.stats.std}}
    return json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")


def dumps_features(matrix: FeatureMatrix) -> bytes:
    header = _header(matrix)
    payload = np.ascontiguousarray(matrix.values, dtype="<f4").tobytes()
    return MAGIC + struct.pack("<I", len(header)) + header + payload


def write_features(matrix: FeatureMatrix, destination: str | Path | BinaryIO) -> None:
    data = dumps_features(matrix)
    if isinstance(destination, (str, Path)):
        Path(destination).write_bytes(data)
    else:
        destination.write(data)


def loads_features(data: bytes, n_phonemes: int | None = None) -> FeatureMatrix:
    if len(data) < 8:
        raise FeatureFormatError("file too short for a feature header")
    if data[:4] != MAGIC:
        raise FeatureFormatError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    (hlen,) = struct.unpack("<I", data[4:8])
    if len(data) < 8 + hlen:
        raise FeatureFormatError("truncated header")
    try:
        header = json.loads(data[8:8 + hlen].decode("utf-8"))
        rows, cols = int(header["rows"]), int(header["cols"])
        stats_d = header["stats"]
        score_id = header["score_id"]
    except (ValueError, KeyError, TypeError) as exc:
        raise FeatureFormatError(f"unreadable header: {exc}") from None
    if rows < 0 or cols < n_columns(1):
        raise FeatureFormatError(f"dimension mismatch: header declares {rows}x{cols}")
    ph = cols - n_columns(0)
    if n_phonemes is not None and ph != n_phonemes:
        raise FeatureFormatError(
            f"dimension mismatch: {cols} columns, expected {n_columns(n_phonemes)}")
    payload = data[8 + hlen:]
    expected = rows * cols * 4
    if len(payload) < expected:
        raise FeatureFormatError(
            f"truncated payload: header says {rows}x{cols} ({expected} bytes), found {len(payload)} bytes")
    if len(payload) > expected:
        raise FeatureFormatError(
            f"dimension mismatch: {len(payload) - expected} bytes beyond the declared {rows}x{cols}")
    values = np.frombuffer(payload, dtype="<f4").reshape(rows, cols).astype(np.float32)
    try:
        stats = DurationStats(float(stats_d["mean"]), float(stats_d["std"]))
    except (StatsError, KeyError, TypeError, ValueError) as exc:
        raise FeatureFormatError(f"bad stats in header: {exc}") from None
    return FeatureMatrix(values, score_id, stats, ph)


def read_features(source: str | Path | BinaryIO, n_phonemes: int | None = None) -> FeatureMatrix:
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
    return loads_features(data, n_phonemes)


def write_features_csv(matrix: FeatureMatrix, destination: str | Path,
                       inventory: PhonemeInventory, octave_min: int = 2) -> None:
    buf = io.StringIO()
    buf.write(",".join(column_names(inventory, octave_min)) + "\n")
    for row in matrix.values:
        buf.write(",".join(f"{v:.6f}" for v in row) + "\n")
    Path(destination).write_text(buf.getvalue(), encoding="utf-8")
