"""Note/phoneme alignment.

Every emitted token carries the context of the note it is sung on: octave
class, step class and the note's duration in seconds. The sequence always
opens with ``<s>``; each word is closed by one ``<wb>`` sung on the word's
last note, and each rest becomes a single pause token.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .lexicon import (
    DEFAULT_ONSETS,
    Lexicon,
    PhonemeInventory,
    SyllabificationError,
    is_vowel,
    phonemize,
    syllabify,
)
from .score import DEFAULT_OCTAVE_RANGE, STEP_NAMES, NoteEvent, Score

N_OCTAVES = 4
REST_OCTAVE_CLASS = N_OCTAVES
REST_STEP_CLASS = 12
START_NOTE_INDEX = -1


class AlignmentError(Exception):
    pass


@dataclass(frozen=True)
class NoteContext:
    octave_class: int
    step_class: int
    duration_seconds: float
    note_index: int

    def __post_init__(self):
        if not 0 <= self.octave_class <= REST_OCTAVE_CLASS:
            raise ValueError(f"octave class {self.octave_class} outside 0..{REST_OCTAVE_CLASS}")
        if not 0 <= self.step_class <= REST_STEP_CLASS:
            raise ValueError(f"step class {self.step_class} outside 0..{REST_STEP_CLASS}")
        if (self.octave_class == REST_OCTAVE_CLASS) != (self.step_class == REST_STEP_CLASS):
            raise ValueError("octave and step must both be rest classes or neither")
        if self.duration_seconds < 0:
            raise ValueError("negative duration")

    @property
    def is_rest(self) -> bool:
        return self.step_class == REST_STEP_CLASS


REST_CONTEXT_START = NoteContext(REST_OCTAVE_CLASS, REST_STEP_CLASS, 0.0, START_NOTE_INDEX)


@dataclass(frozen=True)
class AlignedToken:
    token_id: int
    context: NoteContext
    ramp: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.ramp <= 1.0:
            raise ValueError(f"ramp {self.ramp} outside [0, 1]")


@dataclass(frozen=True)
class AlignedSequence:
    tokens: tuple[AlignedToken, ...]
    score_id: str
    octave_min: int = DEFAULT_OCTAVE_RANGE[0]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self):
        return len(self.tokens)

    @property
    def token_ids(self) -> list[int]:
        return [t.token_id for t in self.tokens]

    @property
    def octaves(self) -> list[int | None]:
        """Absolute octave numbers; None on rest-class tokens."""
        return [None if t.context.is_rest else t.context.octave_class + self.octave_min
                for t in self.tokens]

    @property
    def steps(self) -> list[int]:
        return [t.context.step_class for t in self.tokens]

    @property
    def durations(self) -> list[float]:
        return [t.context.duration_seconds for t in self.tokens]

    @property
    def ramps(self) -> list[float]:
        return [t.ramp for t in self.tokens]

    def token_names(self, inventory: PhonemeInventory) -> list[str]:
        return [inventory.token(i) for i in self.token_ids]


def note_duration_seconds(note: NoteEvent, divisions: int, tempo_qpm: float) -> float:
    return (note.duration_divisions / divisions) * (60.0 / tempo_qpm)


def score_seconds(score: Score) -> list[float]:
    """Seconds of every note, each at the tempo in effect at its onset."""
    return [note_duration_seconds(n, score.divisions, score.tempo_at(n.onset_divisions))
            for n in score.notes]


def _note_context(score: Score, index: int, seconds: float, octave_min: int) -> NoteContext:
    note = score.notes[index]
    if note.is_rest:
        return NoteContext(REST_OCTAVE_CLASS, REST_STEP_CLASS, seconds, index)
    octave_class = note.pitch.octave - octave_min
    if not 0 <= octave_class < N_OCTAVES:
        raise AlignmentError(
            f"{score.score_id}: note {index} ({note.pitch.name}) outside the supported octave range "
            f"{octave_min}-{octave_min + N_OCTAVES - 1}")
    return NoteContext(octave_class, note.pitch.step, seconds, index)


def _collect_words(score: Score):
    """Group notes into words -> syllables -> note indices, plus emission order."""
    words: list[list[list[int]]] = []
    texts: list[list[str]] = []
    events: list[tuple] = []
    open_word = None
    current = None
    for i, note in enumerate(score.notes):
        if note.is_rest:
            events.append(("rest", i))
            current = None
            continue
        lyric = note.lyric
        if lyric is None:
            if current is None:
                raise AlignmentError(
                    f"{score.score_id}: note {i} has no lyric and continues no syllable")
            w, s = current
            words[w][s].append(i)
            continue
        if lyric.starts_word:
            if open_word is not None:
                raise AlignmentError(
                    f"{score.score_id}: note {i} starts a word while the word at note "
                    f"{words[open_word][0][0]} is unfinished")
            words.append([])
            texts.append([])
            open_word = len(words) - 1
        elif open_word is None:
            raise AlignmentError(
                f"{score.score_id}: note {i} has a '{lyric.syllabic}' syllable outside any word")
        words[open_word].append([i])
        texts[open_word].append(lyric.text)
        current = (open_word, len(words[open_word]) - 1)
        events.append(("syl", open_word, current[1]))
        if lyric.ends_word:
            open_word = None
    if open_word is not None:
        raise AlignmentError(
            f"{score.score_id}: word starting at note {words[open_word][0][0]} never ends")
    return words, ["".join(t) for t in texts], events


def _spread_syllable(tokens: list[str], n_notes: int) -> list[list[str]]:
    """Tokens per note for one syllable sung on ``n_notes`` notes.

    The vowel nucleus repeats on every note; onset consonants stay on the
    first note and coda consonants on the last.
    """
    if n_notes == 1:
        return [list(tokens)]
    nucleus = next((k for k, t in enumerate(tokens) if is_vowel(t)), len(tokens) - 1)
    onset, vowel, coda = tokens[:nucleus], tokens[nucleus], tokens[nucleus + 1:]
    per_note = [[vowel] for _ in range(n_notes)]
    per_note[0] = onset + per_note[0]
    per_note[-1] = per_note[-1] + coda
    return per_note


def align(
    score: Score,
    lexicon: Lexicon,
    inventory: PhonemeInventory,
    octave_range: tuple[int, int] = DEFAULT_OCTAVE_RANGE,
    onsets: frozenset = DEFAULT_ONSETS,
) -> AlignedSequence:
    octave_min = octave_range[0]
    if octave_range[1] - octave_min + 1 != N_OCTAVES:
        raise ValueError(f"octave range must span exactly {N_OCTAVES} octaves")
    seconds = score_seconds(score)
    words, word_texts, events = _collect_words(score)
    pronunciations = phonemize(word_texts, lexicon)

    groups = []
    for text, pron, sylls in zip(word_texts, pronunciations, words):
        try:
            groups.append(syllabify(pron, len(sylls), onsets, word=text))
        except SyllabificationError as exc:
            raise AlignmentError(f"{score.score_id}: note {sylls[0][0]}: {exc}") from exc

    out = [AlignedToken(inventory.start_id, REST_CONTEXT_START)]
    for event in events:
        if event[0] == "rest":
            i = event[1]
            out.append(AlignedToken(inventory.pause_id, _note_context(score, i, seconds[i], octave_min)))
            continue
        _, w, s = event
        note_ids = words[w][s]
        for i, toks in zip(note_ids, _spread_syllable(groups[w][s], len(note_ids))):
            ctx = _note_context(score, i, seconds[i], octave_min)
            out.extend(AlignedToken(inventory.id(t), ctx) for t in toks)
        if s == len(words[w]) - 1:
            last = note_ids[-1]
            out.append(AlignedToken(inventory.word_boundary_id,
                                    _note_context(score, last, seconds[last], octave_min)))
    return compute_ramps(AlignedSequence(tuple(out), score.score_id, octave_min))


def compute_ramps(sequence: AlignedSequence) -> AlignedSequence:
    """Set each token's position ramp within its note: 1.0 down to 0.0.

    A note holding a single token gets 0.0.
    """
    tokens = list(sequence.tokens)
    out = []
    i = 0
    while i < len(tokens):
        j = i
        while j < len(tokens) and tokens[j].context.note_index == tokens[i].context.note_index:
            j += 1
        k = j - i
        for pos in range(k):
            ramp = (k - 1 - pos) / (k - 1) if k > 1 else 0.0
            out.append(replace(tokens[i + pos], ramp=ramp))
        i = j
    return replace(sequence, tokens=tuple(out))


def slice_sequence(sequence: AlignedSequence, start: int, end: int, score_id: str | None = None) -> AlignedSequence:
    """Tokens sung on notes ``start <= note_index < end``, behind a fresh ``<s>``."""
    head = sequence.tokens[0]
    body = [t for t in sequence.tokens[1:] if start <= t.context.note_index < end]
    return AlignedSequence((head, *body), score_id or sequence.score_id, sequence.octave_min)


def dump_alignment(sequence: AlignedSequence, inventory: PhonemeInventory) -> str:
    """One token per line: token, octave class, step class, duration, ramp."""
    lines = []
    for tok in sequence.tokens:
        ctx = tok.context
        lines.append(f"{inventory.token(tok.token_id)}\t{ctx.octave_class}\t{ctx.step_class}\t"
                     f"{ctx.duration_seconds:.6f}\t{tok.ramp:.6f}")
    return "\n".join(lines) + "\n"


def step_name(step_class: int) -> str:
    return "rest" if step_class == REST_STEP_CLASS else STEP_NAMES[step_class]


def words_in(sequence_tokens: Sequence[str], inventory: PhonemeInventory) -> list[list[str]]:
    """Split a token-name list on ``<wb>``, dropping ``<s>`` and pauses."""
    words, cur = [], []
    for t in sequence_tokens:
        if t == inventory.word_boundary:
            words.append(cur)
            cur = []
        elif t not in (inventory.start, inventory.pause):
            cur.append(t)
    return words
