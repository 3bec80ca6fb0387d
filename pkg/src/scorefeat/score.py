"""Monophonic score model, MusicXML reader/writer and score validation.

Only single-part, single-voice scores are supported. Accidentals are folded
into a 0-11 chromatic step as soon as a pitch is read, so enharmonic spelling
is lost (B#3 and C4 parse to the same Pitch).
"""

from __future__ import annotations

import bisect
import io
import json
import re
import zipfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable

STEP_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")
_LETTER_PC = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
# pitch class -> (letter, alter) used when writing; sharps only
_PC_SPELLING = (
    ("C", 0), ("C", 1), ("D", 0), ("D", 1), ("E", 0), ("F", 0),
    ("F", 1), ("G", 0), ("G", 1), ("A", 0), ("A", 1), ("B", 0),
)
SYLLABIC_VALUES = ("single", "begin", "middle", "end")

DEFAULT_OCTAVE_RANGE = (2, 5)

# beat-unit name -> length in quarter notes
_BEAT_UNITS = {
    "maxima": Fraction(32), "long": Fraction(16), "breve": Fraction(8),
    "whole": Fraction(4), "half": Fraction(2), "quarter": Fraction(1),
    "eighth": Fraction(1, 2), "16th": Fraction(1, 4), "32nd": Fraction(1, 8),
    "64th": Fraction(1, 16),
}


class ScoreError(Exception):
    """Base class for score reading errors."""


class ScoreParseError(ScoreError):
    """The document is not a readable MusicXML score.

    ``line`` and ``column`` are set when the XML itself is malformed.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedFeatureError(ScoreError):
    """The score uses notation this reader refuses (chords, several parts...)."""


@dataclass(frozen=True, order=True)
class Pitch:
    step: int
    octave: int

    def __post_init__(self):
        if not 0 <= self.step <= 11:
            raise ValueError(f"pitch step must be in 0..11, got {self.step}")

    @property
    def chromatic(self) -> int:
        return self.octave * 12 + self.step

    @classmethod
    def from_chromatic(cls, index: int) -> "Pitch":
        octave, step = divmod(index, 12)
        return cls(step, octave)

    @classmethod
    def from_name(cls, name: str) -> "Pitch":
        """Parse names such as ``"G3"``, ``"C#4"``, ``"Bb2"`` or ``"D-5"``."""
        m = re.fullmatch(r"([A-Ga-g])([#b\-]*)(-?\d+)", name.strip())
        if m is None:
            raise ValueError(f"bad pitch name {name!r}")
        letter, accidentals, octave = m.groups()
        alter = accidentals.count("#") - accidentals.count("b") - accidentals.count("-")
        return cls.from_chromatic(int(octave) * 12 + _LETTER_PC[letter.upper()] + alter)

    @property
    def name(self) -> str:
        return f"{STEP_NAMES[self.step]}{self.octave}"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class LyricSyllable:
    text: str
    syllabic: str = "single"
    melisma_extend: bool = False

    def __post_init__(self):
        if self.syllabic not in SYLLABIC_VALUES:
            raise ValueError(f"syllabic must be one of {SYLLABIC_VALUES}, got {self.syllabic!r}")

    @property
    def starts_word(self) -> bool:
        return self.syllabic in ("single", "begin")

    @property
    def ends_word(self) -> bool:
        return self.syllabic in ("single", "end")


@dataclass(frozen=True)
class NoteEvent:
    kind: str
    duration_divisions: int
    onset_divisions: int
    pitch: Pitch | None = None
    tie_start: bool = False
    tie_stop: bool = False
    lyric: LyricSyllable | None = None
    measure_index: int = 0

    def __post_init__(self):
        if self.kind not in ("note", "rest"):
            raise ValueError(f"kind must be 'note' or 'rest', got {self.kind!r}")
        if self.duration_divisions <= 0:
            raise ValueError("duration_divisions must be positive")
        if self.onset_divisions < 0:
            raise ValueError("onset_divisions must be nonnegative")
        if self.kind == "rest":
            if self.pitch is not None or self.lyric is not None:
                raise ValueError("rests carry no pitch and no lyric")
            if self.tie_start or self.tie_stop:
                raise ValueError("rests cannot be tied")
        elif self.pitch is None:
            raise ValueError("pitched note without a pitch")

    @property
    def is_rest(self) -> bool:
        return self.kind == "rest"


@dataclass(frozen=True)
class Score:
    """An immutable monophonic score.

    ``tempo_map`` holds ``(onset_divisions, qpm)`` pairs sorted by onset and
    starting at onset 0. ``time_signatures`` holds one ``(numerator,
    denominator)`` per measure; measures past the end reuse the last entry.
    """

    divisions: int
    tempo_map: tuple[tuple[int, float], ...]
    notes: tuple[NoteEvent, ...]
    time_signatures: tuple[tuple[int, int], ...] = ((4, 4),)
    score_id: str = "score"

    def __post_init__(self):
        object.__setattr__(self, "tempo_map", tuple((int(o), float(q)) for o, q in self.tempo_map))
        object.__setattr__(self, "notes", tuple(self.notes))
        object.__setattr__(self, "time_signatures", tuple((int(n), int(d)) for n, d in self.time_signatures))
        if self.divisions < 1:
            raise ValueError("divisions must be >= 1")
        if not self.tempo_map:
            raise ValueError("tempo map is empty")
        if self.tempo_map[0][0] != 0:
            raise ValueError("tempo map must start at onset 0")
        for (o1, _), (o2, _) in zip(self.tempo_map, self.tempo_map[1:]):
            if o2 <= o1:
                raise ValueError("tempo map onsets must be strictly increasing")
        if any(q <= 0 for _, q in self.tempo_map):
            raise ValueError("every tempo entry must have qpm > 0")
        if not self.time_signatures:
            raise ValueError("at least one time signature is required")
        for n, d in self.time_signatures:
            if n <= 0 or d <= 0:
                raise ValueError(f"bad time signature {n}/{d}")
        for a, b in zip(self.notes, self.notes[1:]):
            if b.onset_divisions < a.onset_divisions:
                raise ValueError("note onsets must be nondecreasing")

    @property
    def tempo_qpm(self) -> float:
        return self.tempo_map[0][1]

    def tempo_at(self, onset_divisions: int) -> float:
        onsets = [o for o, _ in self.tempo_map]
        i = bisect.bisect_right(onsets, onset_divisions) - 1
        return self.tempo_map[max(i, 0)][1]

    def time_signature(self, measure_index: int) -> tuple[int, int]:
        return self.time_signatures[min(measure_index, len(self.time_signatures) - 1)]

    def measure_length(self, measure_index: int) -> Fraction:
        num, den = self.time_signature(measure_index)
        return Fraction(num * self.divisions * 4, den)

    @property
    def total_divisions(self) -> int:
        return sum(n.duration_divisions for n in self.notes)

    @property
    def pitched_notes(self) -> list[NoteEvent]:
        return [n for n in self.notes if not n.is_rest]

    def replace(self, **changes) -> "Score":
        return replace(self, **changes)


@dataclass(frozen=True)
class Finding:
    severity: str  # "warning" | "error"
    message: str
    location: str

    def __str__(self):
        return f"{self.severity}: {self.location}: {self.message}"


# ---------------------------------------------------------------------------
# Convenience construction


def score_from_events(
    events: Iterable[tuple],
    *,
    divisions: int = 1,
    qpm: float = 120.0,
    time_signature: tuple[int, int] = (4, 4),
    score_id: str = "score",
) -> Score:
    """Build a score from compact ``(pitch, duration[, lyric])`` tuples.

    ``pitch`` is a name such as ``"G3"`` or ``None`` for a rest; a trailing
    ``~`` (``"G3~"``) ties the note into the next one. ``lyric`` follows the
    usual hyphen convention: ``"twin-"`` begins a word, ``"-kle"`` ends it,
    ``"-a-"`` is a middle syllable and a bare word is a single syllable. A
    trailing ``_`` marks a melisma extension.

    Measures are assigned by filling ``time_signature`` from onset 0.
    """
    measure_len = Fraction(time_signature[0] * divisions * 4, time_signature[1])
    notes = []
    onset = 0
    tie_pending = False
    for ev in events:
        pitch_name, duration = ev[0], int(ev[1])
        lyric_text = ev[2] if len(ev) > 2 else None
        measure = int(Fraction(onset) // measure_len)
        if pitch_name is None:
            notes.append(NoteEvent("rest", duration, onset, measure_index=measure))
            tie_pending = False
        else:
            tie_start = pitch_name.endswith("~")
            pitch = Pitch.from_name(pitch_name.rstrip("~"))
            lyric = _lyric_from_text(lyric_text) if lyric_text else None
            notes.append(
                NoteEvent("note", duration, onset, pitch, tie_start=tie_start,
                          tie_stop=tie_pending, lyric=lyric, measure_index=measure)
            )
            tie_pending = tie_start
        onset += duration
    n_measures = max(1, int(-(-Fraction(onset) // measure_len)))
    return Score(divisions, ((0, qpm),), tuple(notes), (time_signature,) * n_measures, score_id)


def _lyric_from_text(text: str) -> LyricSyllable:
    extend = text.endswith("_")
    text = text.rstrip("_")
    lead, trail = text.startswith("-") and len(text) > 1, text.endswith("-") and len(text) > 1
    core = text[1 if lead else 0: len(text) - 1 if trail else len(text)]
    syllabic = {(False, False): "single", (False, True): "begin",
                (True, True): "middle", (True, False): "end"}[(lead, trail)]
    return LyricSyllable(core, syllabic, extend)


# ---------------------------------------------------------------------------
# Reading


def load_score(path: str | Path, score_id: str | None = None) -> Score:
    path = Path(path)
    return parse_musicxml(path.read_bytes(), score_id=score_id or path.stem)


def parse_musicxml(document: bytes, score_id: str | None = None) -> Score:
    """Parse an uncompressed MusicXML partwise document or an .mxl container."""
    if document[:4] == b"PK\x03\x04":
        document = _extract_mxl_root(document)
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position
        raise ScoreParseError("malformed XML", line, column) from None

    if root.tag == "score-timewise":
        raise UnsupportedFeatureError("timewise MusicXML is not supported; convert to partwise")
    if root.tag != "score-partwise":
        raise ScoreParseError(f"root element is <{root.tag}>, expected <score-partwise>")
    parts = root.findall("part")
    if not parts:
        raise ScoreParseError("score has no <part>")
    if len(parts) > 1:
        raise UnsupportedFeatureError(f"score has {len(parts)} parts; only single-part scores are supported")

    if score_id is None:
        score_id = (root.findtext("work/work-title") or root.findtext("movement-title") or "score").strip()
    return _read_part(parts[0], score_id)


def _extract_mxl_root(document: bytes) -> bytes:
    try:
        archive = zipfile.ZipFile(io.BytesIO(document))
    except zipfile.BadZipFile as exc:
        raise ScoreParseError(f"corrupt MXL container: {exc}") from None
    with archive:
        names = archive.namelist()
        if "META-INF/container.xml" in names:
            container = ET.fromstring(archive.read("META-INF/container.xml"))
            rootfile = next(iter(container.iter("rootfile")), None)
            if rootfile is None or not rootfile.get("full-path"):
                raise ScoreParseError("MXL container.xml names no rootfile")
            return archive.read(rootfile.get("full-path"))
        candidates = [n for n in names if not n.startswith("META-INF/")
                      and n.endswith((".xml", ".musicxml"))]
        if not candidates:
            raise ScoreParseError("MXL container holds no MusicXML file")
        return archive.read(candidates[0])


class _PartReader:
    def __init__(self, score_id: str):
        self.score_id = score_id
        self.divisions: int | None = None
        self.time_sig: tuple[int, int] | None = None
        self.time_signatures: list[tuple[int, int]] = []
        self.tempi: dict[int, float] = {}
        self.notes: list[NoteEvent] = []
        self.pos = 0
        self.voices: set[str] = set()

    def measure_label(self, measure: ET.Element, index: int) -> str:
        return f"measure {measure.get('number', index + 1)}"

    def read_attributes(self, attrs: ET.Element, label: str):
        div = attrs.findtext("divisions")
        if div is not None:
            value = int(div)
            if value < 1:
                raise ScoreParseError(f"{label}: divisions must be positive")
            if self.divisions is not None and value != self.divisions:
                raise UnsupportedFeatureError(f"{label}: divisions change from {self.divisions} to {value}")
            self.divisions = value
        time = attrs.find("time")
        if time is not None and time.findtext("beats"):
            beats = time.findtext("beats")
            if "+" in beats:
                raise UnsupportedFeatureError(f"{label}: composite time signature {beats}")
            self.time_sig = (int(beats), int(time.findtext("beat-type")))

    def read_tempo(self, elem: ET.Element):
        sound = elem if elem.tag == "sound" else elem.find("sound")
        if sound is not None and sound.get("tempo"):
            qpm = float(sound.get("tempo"))
        else:
            metronome = elem.find("direction-type/metronome")
            if metronome is None or metronome.findtext("per-minute") is None:
                return
            unit = _BEAT_UNITS.get((metronome.findtext("beat-unit") or "quarter").strip())
            if unit is None:
                return
            if metronome.find("beat-unit-dot") is not None:
                unit *= Fraction(3, 2)
            try:
                per_minute = float(metronome.findtext("per-minute"))
            except ValueError:
                return
            qpm = per_minute * float(unit)
        if qpm <= 0:
            raise ScoreParseError(f"nonpositive tempo {qpm}")
        self.tempi[self.pos] = qpm

    def read_note(self, note: ET.Element, label: str, measure_index: int):
        if note.find("grace") is not None or note.find("cue") is not None:
            return
        if note.find("chord") is not None:
            raise UnsupportedFeatureError(f"{label}: chords are not supported (monophonic scores only)")
        if self.divisions is None:
            raise ScoreParseError(f"{label}: note before any <divisions> declaration")
        voice = note.findtext("voice")
        if voice is not None:
            self.voices.add(voice.strip())
            if len(self.voices) > 1:
                raise UnsupportedFeatureError(f"{label}: multiple voices are not supported")
        dur_text = note.findtext("duration")
        if dur_text is None:
            raise ScoreParseError(f"{label}: note without <duration>")
        duration = int(dur_text)
        if duration <= 0:
            raise ScoreParseError(f"{label}: nonpositive note duration")

        if note.find("rest") is not None:
            event = NoteEvent("rest", duration, self.pos, measure_index=measure_index)
        else:
            if note.find("unpitched") is not None:
                raise UnsupportedFeatureError(f"{label}: unpitched (percussion) notes are not supported")
            pitch_el = note.find("pitch")
            if pitch_el is None:
                raise ScoreParseError(f"{label}: note without <pitch> or <rest>")
            letter = (pitch_el.findtext("step") or "").strip().upper()
            if letter not in _LETTER_PC:
                raise ScoreParseError(f"{label}: bad pitch step {letter!r}")
            alter_f = float(pitch_el.findtext("alter") or 0)
            if alter_f != int(alter_f):
                raise UnsupportedFeatureError(f"{label}: microtonal alter {alter_f}")
            octave = int(pitch_el.findtext("octave"))
            pitch = Pitch.from_chromatic(octave * 12 + _LETTER_PC[letter] + int(alter_f))
            tie_types = {t.get("type") for t in note.findall("tie")}
            tie_types |= {t.get("type") for t in note.findall("notations/tied")}
            event = NoteEvent(
                "note", duration, self.pos, pitch,
                tie_start="start" in tie_types, tie_stop="stop" in tie_types,
                lyric=_read_lyric(note), measure_index=measure_index,
            )
        self.notes.append(event)
        self.pos += duration


def _read_lyric(note: ET.Element) -> LyricSyllable | None:
    lyrics = note.findall("lyric")
    if not lyrics:
        return None
    lyric = next((ly for ly in lyrics if ly.get("number", "1") == "1"), lyrics[0])
    texts = [t.text or "" for t in lyric.findall("text")]
    text = "".join(texts).strip()
    extend = lyric.find("extend")
    melisma = extend is not None and extend.get("type", "start") != "stop"
    if not text:
        return None
    syllabic = (lyric.findtext("syllabic") or "single").strip()
    if syllabic not in SYLLABIC_VALUES:
        raise ScoreParseError(f"bad syllabic value {syllabic!r}")
    return LyricSyllable(text, syllabic, melisma)


def _read_part(part: ET.Element, score_id: str) -> Score:
    reader = _PartReader(score_id)
    for index, measure in enumerate(part.findall("measure")):
        label = reader.measure_label(measure, index)
        for elem in measure:
            if elem.tag == "attributes":
                reader.read_attributes(elem, label)
            elif elem.tag in ("direction", "sound"):
                reader.read_tempo(elem)
            elif elem.tag == "note":
                reader.read_note(elem, label, index)
            elif elem.tag == "backup":
                raise UnsupportedFeatureError(f"{label}: <backup> implies polyphony, which is not supported")
            elif elem.tag == "forward":
                if reader.divisions is None:
                    raise ScoreParseError(f"{label}: <forward> before any <divisions> declaration")
                duration = int(elem.findtext("duration"))
                reader.notes.append(NoteEvent("rest", duration, reader.pos, measure_index=index))
                reader.pos += duration
        if reader.time_sig is None:
            raise ScoreParseError(f"{label}: no time signature")
        reader.time_signatures.append(reader.time_sig)

    if reader.divisions is None:
        raise ScoreParseError("score declares no <divisions>")
    if not reader.tempi:
        raise ScoreParseError("score declares no tempo (sound/@tempo or metronome)")
    # tempo before the first marking is the first marking
    tempo_map = sorted(reader.tempi.items())
    tempo_map[0] = (0, tempo_map[0][1])
    return Score(reader.divisions, tuple(tempo_map), tuple(reader.notes),
                 tuple(reader.time_signatures), score_id)


# ---------------------------------------------------------------------------
# Writing


def write_musicxml(score: Score) -> bytes:
    """Serialize ``score`` as a MusicXML 3.1 partwise document.

    Reading the result back with :func:`parse_musicxml` gives an equal Score
    as long as every tempo change falls on a note onset.
    """
    root = ET.Element("score-partwise", version="3.1")
    ET.SubElement(ET.SubElement(root, "work"), "work-title").text = score.score_id
    part_list = ET.SubElement(root, "part-list")
    ET.SubElement(ET.SubElement(part_list, "score-part", id="P1"), "part-name").text = "Voice"
    part = ET.SubElement(root, "part", id="P1")

    by_measure: dict[int, list[NoteEvent]] = {}
    for note in score.notes:
        by_measure.setdefault(note.measure_index, []).append(note)
    n_measures = max([len(score.time_signatures)] + [m + 1 for m in by_measure])
    tempi = list(score.tempo_map)

    prev_sig = None
    for m in range(n_measures):
        measure = ET.SubElement(part, "measure", number=str(m + 1))
        sig = score.time_signature(m)
        if m == 0 or sig != prev_sig:
            attrs = ET.SubElement(measure, "attributes")
            if m == 0:
                ET.SubElement(attrs, "divisions").text = str(score.divisions)
            time = ET.SubElement(attrs, "time")
            ET.SubElement(time, "beats").text = str(sig[0])
            ET.SubElement(time, "beat-type").text = str(sig[1])
        prev_sig = sig
        for note in by_measure.get(m, []):
            while tempi and tempi[0][0] <= note.onset_divisions:
                _, qpm = tempi.pop(0)
                direction = ET.SubElement(measure, "direction", placement="above")
                metronome = ET.SubElement(ET.SubElement(direction, "direction-type"), "metronome")
                ET.SubElement(metronome, "beat-unit").text = "quarter"
                ET.SubElement(metronome, "per-minute").text = _fmt_number(qpm)
                ET.SubElement(direction, "sound", tempo=repr(qpm))
            _write_note(measure, note)
    ET.indent(root)
    body = ET.tostring(root, encoding="unicode")
    header = ('<?xml version="1.0" encoding="UTF-8"?>\n'
              '<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 Partwise//EN" '
              '"http://www.musicxml.org/dtds/partwise.dtd">\n')
    return (header + body + "\n").encode("utf-8")


def _fmt_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)


def _write_note(measure: ET.Element, note: NoteEvent):
    el = ET.SubElement(measure, "note")
    if note.is_rest:
        ET.SubElement(el, "rest")
    else:
        letter, alter = _PC_SPELLING[note.pitch.step]
        pitch = ET.SubElement(el, "pitch")
        ET.SubElement(pitch, "step").text = letter
        if alter:
            ET.SubElement(pitch, "alter").text = str(alter)
        ET.SubElement(pitch, "octave").text = str(note.pitch.octave)
    ET.SubElement(el, "duration").text = str(note.duration_divisions)
    ties = [t for t, on in (("stop", note.tie_stop), ("start", note.tie_start)) if on]
    for t in ties:
        ET.SubElement(el, "tie", type=t)
    ET.SubElement(el, "voice").text = "1"
    if ties:
        notations = ET.SubElement(el, "notations")
        for t in ties:
            ET.SubElement(notations, "tied", type=t)
    if note.lyric is not None:
        lyric = ET.SubElement(el, "lyric", number="1")
        ET.SubElement(lyric, "syllabic").text = note.lyric.syllabic
        ET.SubElement(lyric, "text").text = note.lyric.text
        if note.lyric.melisma_extend:
            ET.SubElement(lyric, "extend")


# ---------------------------------------------------------------------------
# Canonical dump and validation


def dump_score(score: Score) -> str:
    """Canonical plain-text dump, one note per line, for golden comparisons."""
    lines = [f"score {json.dumps(score.score_id)}", f"divisions {score.divisions}"]
    lines += [f"tempo {onset} {qpm!r}" for onset, qpm in score.tempo_map]
    lines += [f"time {i} {n}/{d}" for i, (n, d) in enumerate(score.time_signatures)]
    for note in score.notes:
        if note.is_rest:
            step, octave = "-", "-"
        else:
            step, octave = STEP_NAMES[note.pitch.step], str(note.pitch.octave)
        ties = {(False, False): "-", (True, False): "start", (False, True): "stop",
                (True, True): "stop+start"}[(note.tie_start, note.tie_stop)]
        if note.lyric is None:
            lyric = "-"
        else:
            lyric = f"{note.lyric.syllabic}:{json.dumps(note.lyric.text, ensure_ascii=False)}"
            if note.lyric.melisma_extend:
                lyric += "+extend"
        lines.append(f"m{note.measure_index} {note.onset_divisions} {note.duration_divisions} "
                     f"{step} {octave} {ties} {lyric}")
    return "\n".join(lines) + "\n"


def validate_score(score: Score, octave_range: tuple[int, int] = DEFAULT_OCTAVE_RANGE) -> list[Finding]:
    findings: list[Finding] = []
    lo, hi = octave_range

    fill: dict[int, int] = {}
    for note in score.notes:
        fill[note.measure_index] = fill.get(note.measure_index, 0) + note.duration_divisions
    for m in sorted(fill):
        expected = score.measure_length(m)
        if fill[m] != expected:
            num, den = score.time_signature(m)
            findings.append(Finding(
                "warning", f"measure fill {fill[m]} divisions, {num}/{den} expects {expected}",
                f"measure {m + 1}"))

    for i, note in enumerate(score.notes):
        if note.pitch is not None and not lo <= note.pitch.octave <= hi:
            findings.append(Finding(
                "error", f"octave out of supported range ({note.pitch.name} outside {lo}-{hi})",
                f"note {i}"))

    notes = score.notes
    for i, note in enumerate(notes):
        nxt = notes[i + 1] if i + 1 < len(notes) else None
        prev = notes[i - 1] if i > 0 else None
        if note.tie_start and not (nxt is not None and nxt.tie_stop and nxt.pitch == note.pitch):
            findings.append(Finding("error", "dangling tie start", f"note {i}"))
        if note.tie_stop and not (prev is not None and prev.tie_start and prev.pitch == note.pitch):
            findings.append(Finding("error", "tie stop without matching tie start", f"note {i}"))

    open_word = None
    for i, note in enumerate(score.notes):
        lyric = note.lyric
        if lyric is None:
            continue
        if lyric.starts_word and open_word is not None:
            findings.append(Finding(
                "error", f"word begun at note {open_word} never ends", f"note {i}"))
            open_word = None
        if not lyric.starts_word and open_word is None:
            findings.append(Finding(
                "error", f"'{lyric.syllabic}' syllable without a preceding 'begin'", f"note {i}"))
        if lyric.syllabic == "begin":
            open_word = i
        elif lyric.ends_word:
            open_word = None
    if open_word is not None:
        findings.append(Finding("error", f"word begun at note {open_word} never ends", "end of score"))
    return findings

