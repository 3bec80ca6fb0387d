import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scorefeat.aligner import score_seconds
from scorefeat.augmenter import (
    DEFAULT_SEMITONES,
    DEFAULT_TEMPO_FACTORS,
    AugmentationSpec,
    RangeError,
    augmentation_grid,
    grid_specs,
    note_pitch_histogram,
    pitch_change_histogram,
    scale_tempo,
    transpose,
)
from scorefeat.score import Pitch, dump_score, score_from_events


def test_transpose_examples():
    up = transpose(score_from_events([("C4", 1, "la"), ("B3", 1, "la")]), 1)
    assert [n.pitch for n in up.notes] == [Pitch(1, 4), Pitch(0, 4)]


def test_transpose_keeps_rests_and_durations():
    score = score_from_events([("C4", 3, "la"), (None, 2), ("E4", 1, "la")])
    up = transpose(score, 2)
    assert up.notes[1] == score.notes[1]
    assert [n.duration_divisions for n in up.notes] == [3, 2, 1]


def test_transpose_roundtrip_three():
    score = score_from_events([("C4", 1, "la"), ("G#3", 2, "oo"), (None, 1), ("A4", 1, "me")])
    assert transpose(transpose(score, 3), -3) == score


def test_transpose_below_floor_names_note():
    score = score_from_events([("D3", 1, "la"), ("C2", 1, "la")])
    with pytest.raises(RangeError, match="note 1 C2"):
        transpose(score, -1)


def test_scale_tempo_examples():
    score = score_from_events([("C4", 1, "la")], qpm=120)
    assert score_seconds(scale_tempo(score, 1.0)) == [0.5]
    slow = scale_tempo(score, 0.85)
    assert slow.tempo_map == ((0, 102.0),)
    assert score_seconds(slow)[0] == pytest.approx(0.5882, abs=5e-5)
    assert score_seconds(scale_tempo(score, 1.15))[0] == pytest.approx(0.4348, abs=5e-5)
    with pytest.raises(ValueError):
        scale_tempo(score, 0.0)


def test_variant_ids():
    specs = grid_specs()
    assert len(specs) == 35
    assert specs[0].variant_id == "s-1_t0.85"
    assert specs[6].variant_id == "s-1_t1.15"
    assert specs[-1].variant_id == "s+3_t1.15"
    assert AugmentationSpec(0, 1.0).variant_id == "s+0_t1.00"
    assert sum(s.is_identity for s in specs) == 1


def test_grid_in_range_score():
    score = score_from_events([("C4", 1, "la"), ("E4", 1, "la"), ("G3", 2, "oo")])
    grid = augmentation_grid(score)
    assert len(grid) == 35 and not grid.errors
    assert [s for s, _ in grid] == grid_specs()
    identity = dict(grid)[AugmentationSpec(0, 1.0)]
    assert identity == score


def test_grid_at_ceiling():
    # B5 is the highest supported note: every positive shift leaves the range,
    # so 3 semitone values x 7 factors fail and 2 x 7 succeed.
    score = score_from_events([("C4", 1, "la"), ("B5", 1, "la")])
    grid = augmentation_grid(score)
    assert len(grid.errors) == 21
    assert len(grid) == 14
    assert {s.semitones for s, _ in grid.errors} == {1, 2, 3}
    # A5: only +3 falls off
    grid = augmentation_grid(score_from_events([("A5", 1, "la")]))
    assert (len(grid), len(grid.errors)) == (28, 7)


def test_grid_identity_failure_raises():
    with pytest.raises(RangeError):
        augmentation_grid(score_from_events([("C7", 1, "la")]))


def test_histogram_examples():
    score = score_from_events([("C4", 1, "la"), ("D4", 1, "la"), (None, 1), ("C4", 1, "la")])
    hist = pitch_change_histogram([score])
    assert hist.bins == {2: 1, -2: 1}
    assert hist.total == 2
    assert pitch_change_histogram([score_from_events([("C4", 1, "la")])]).bins == {}
    assert hist.to_csv() == "interval,count\n-2,1\n2,1\n"


def test_note_pitch_histogram(tmp_path):
    score = score_from_events([("C4", 1, "la"), ("C4", 1, "la"), ("D2", 1, "la")])
    hist = note_pitch_histogram([score])
    assert hist.bins == {48: 2, 26: 1}
    hist.write_csv(tmp_path / "p.csv", key="pitch")
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "pitch,count"


def test_augmented_histogram_is_35x(tmp_path):
    score = score_from_events([("C4", 1, "la"), ("E4", 1, "la"), ("D4", 1, "la"), ("G3", 1, "la")])
    base = pitch_change_histogram([score])
    aug = pitch_change_histogram([s for _, s in augmentation_grid(score)])
    assert aug.support == base.support
    assert aug.bins == {k: 35 * v for k, v in base.bins.items()}


pitch_names = st.sampled_from(["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"])


@st.composite
def mid_range_scores(draw):
    # octaves 3-4 keep every default shift in range
    events = []
    for _ in range(draw(st.integers(1, 20))):
        if events and draw(st.integers(0, 4)) == 0:
            events.append((None, draw(st.integers(1, 4))))
        else:
            events.append((draw(pitch_names) + str(draw(st.integers(3, 4))), draw(st.integers(1, 4)), "la"))
    return score_from_events(events, qpm=draw(st.sampled_from([50.0, 90.0, 121.5])))


@settings(max_examples=100, deadline=None)
@given(mid_range_scores(), st.sampled_from(DEFAULT_SEMITONES))
def test_transpose_roundtrip_and_interval_invariance(score, n):
    shifted = transpose(score, n)
    assert dump_score(transpose(shifted, -n)) == dump_score(score)
    assert pitch_change_histogram([shifted]).bins == pitch_change_histogram([score]).bins


@settings(max_examples=100, deadline=None)
@given(mid_range_scores(), st.sampled_from(DEFAULT_TEMPO_FACTORS))
def test_duration_scaling(score, factor):
    before = score_seconds(score)
    after = score_seconds(scale_tempo(score, factor))
    assert all(abs(a * factor - b) <= 1e-9 for a, b in zip(after, before))

