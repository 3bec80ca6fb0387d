import io
import struct

import numpy as np
import pytest

from scorefeat.aligner import (
    REST_OCTAVE_CLASS,
    REST_STEP_CLASS,
    AlignedSequence,
    AlignedToken,
    NoteContext,
    align,
    compute_ramps,
)
from scorefeat.embedder import (
    MAGIC,
    DurationStats,
    FeatureFormatError,
    StatsError,
    build_feature_matrix,
    column_names,
    compute_duration_stats,
    dumps_features,
    load_stats,
    loads_features,
    n_columns,
    read_features,
    save_stats,
    write_features,
    write_features_csv,
)
from scorefeat.score import score_from_events


def seq_of(durations, token_id=0):
    toks = [AlignedToken(token_id, NoteContext(1, 7, d, i)) for i, d in enumerate(durations)]
    return AlignedSequence(tuple(toks), "x")


def give_matrix(inventory, lexicon, stats=DurationStats(0.37, 0.1)):
    score = score_from_events([("G3", 37, "give")], divisions=100, qpm=60, score_id="give")
    seq = align(score, lexicon, inventory)
    return build_feature_matrix(seq, stats, inventory)


def test_column_count():
    # 84 + (4 + 1) + (12 + 1) + 1 + 1
    assert n_columns() == 104


def test_stats_population_std():
    stats = compute_duration_stats([seq_of([0.1, 0.1, 0.2, 0.2])])
    assert stats.mean == pytest.approx(0.15, abs=1e-12)
    assert stats.std == pytest.approx(0.05, abs=1e-12)
    assert stats.n == 4


def test_stats_errors():
    with pytest.raises(StatsError, match="at least 2"):
        compute_duration_stats([seq_of([0.3])])
    with pytest.raises(StatsError, match="identical"):
        compute_duration_stats([seq_of([0.5] * 6)])
    with pytest.raises(StatsError):
        DurationStats(0.1, 0.0)


def test_stats_skip_start_token(inventory, lexicon):
    seq = align(score_from_events([("C4", 1, "give"), ("C4", 2, "me")]), lexicon, inventory)
    stats = compute_duration_stats([seq])
    assert stats.n == len(seq) - 1


def test_stats_file_roundtrip(tmp_path):
    stats = DurationStats(0.25, 0.125, 40)
    save_stats(stats, tmp_path / "stats.json")
    assert load_stats(tmp_path / "stats.json") == stats


def test_give_matrix(inventory, lexicon):
    m = give_matrix(inventory, lexicon)
    body = m.values[1:]
    assert body.shape == (4, 104)
    assert [inventory.token(int(i)) for i in body[:, :84].argmax(axis=1)] == ["g", "ih1", "v", "<wb>"]
    # octave 3 is the second of (2, 3, 4, 5); G is step 7
    assert (body[:, 84:89] == np.array([0, 1, 0, 0, 0], dtype=np.float32)).all()
    expected_step = np.zeros(13, dtype=np.float32)
    expected_step[7] = 1
    assert (body[:, 89:102] == expected_step).all()
    assert np.allclose(body[:, 102], 0.0, atol=1e-6)
    assert np.allclose(body[:, 103], [1.0, 2 / 3, 1 / 3, 0.0], atol=1e-6)
    assert [round(float(r), 2) for r in body[:, 103]] == [1.0, 0.67, 0.33, 0.0]


def test_melisma_matrix(inventory, lexicon):
    score = score_from_events([("G3", 1, "oo_"), ("E3", 1), ("F3", 2)], divisions=10, qpm=60)
    m = build_feature_matrix(align(score, lexicon, inventory), DurationStats(0.1, 0.05), inventory)
    rows = m.values[1:4]
    assert (rows[:, :84] == rows[0, :84]).all()
    assert rows[:, 89:102].argmax(axis=1).tolist() == [7, 4, 5]
    assert np.allclose(rows[:, 102], [0.0, 0.0, 2.0], atol=1e-6)


def test_pause_row_uses_rest_positions(inventory):
    ctx = NoteContext(REST_OCTAVE_CLASS, REST_STEP_CLASS, 1.0, 0)
    seq = AlignedSequence((AlignedToken(inventory.pause_id, ctx),), "p")
    m = build_feature_matrix(seq, DurationStats(0.5, 0.25), inventory)
    assert m.shape == (1, 104)
    assert m.octave_block[0].tolist() == [0, 0, 0, 0, 1]
    assert m.step_block[0].tolist() == [0] * 12 + [1]
    assert m.values[0, inventory.pause_id] == 1.0


def test_blocks_are_exact_one_hots(inventory, lexicon):
    score = score_from_events([("C4", 1, "twin-"), ("C4", 1, "-kle"), (None, 1), ("G4", 1, "star_"),
                               ("A4", 1), (None, 2), ("F#2", 3, "give")])
    seq = align(score, lexicon, inventory)
    m = build_feature_matrix(seq, compute_duration_stats([seq]), inventory)
    for block in (m.phoneme_block, m.octave_block, m.step_block):
        assert set(np.unique(block).tolist()) <= {0.0, 1.0}
        assert (block.sum(axis=1) == 1.0).all()
    assert ((m.ramp_column >= 0) & (m.ramp_column <= 1)).all()
    rest_rows = m.octave_block[:, -1] == 1
    assert rest_rows.any()
    assert (m.octave_block[rest_rows, :4] == 0).all()
    assert (m.step_block[rest_rows, :12] == 0).all()
    # z-score invertibility
    assert np.allclose(m.durations_seconds(), seq.durations, atol=1e-6, rtol=0)


def test_unknown_class_or_token(inventory):
    with pytest.raises(ValueError, match="step class 13"):
        NoteContext(0, 13, 1.0, 0)
    seq = AlignedSequence((AlignedToken(84, NoteContext(0, 0, 1.0, 0)),), "x")
    with pytest.raises(ValueError, match="outside inventory"):
        build_feature_matrix(seq, DurationStats(1.0, 1.0), inventory)


def test_column_names(inventory):
    names = column_names(inventory)
    assert len(names) == 104
    assert names[84] == "oct:2" and names[88] == "oct:rest"
    assert names[-2:] == ["duration_z", "ramp"]


def test_binary_roundtrip_and_layout(inventory, lexicon, tmp_path):
    m = give_matrix(inventory, lexicon)
    path = tmp_path / "give.utf1"
    write_features(m, path)
    data = path.read_bytes()
    assert data[:4] == MAGIC
    (hlen,) = struct.unpack("<I", data[4:8])
    assert len(data) == 8 + hlen + 5 * 104 * 4
    back = read_features(path)
    assert back == m
    assert back.values.tobytes() == m.values.tobytes()
    assert back.stats.mean == 0.37 and back.stats.std == 0.1
    buf = io.BytesIO()
    write_features(m, buf)
    assert buf.getvalue() == data


def test_binary_errors(inventory, lexicon):
    data = dumps_features(give_matrix(inventory, lexicon))
    with pytest.raises(FeatureFormatError, match="magic"):
        loads_features(b"UTF2" + data[4:])
    # drop the last row of payload
    with pytest.raises(FeatureFormatError, match="truncated payload"):
        loads_features(data[:-104 * 4])
    with pytest.raises(FeatureFormatError, match="truncated header"):
        loads_features(data[:12])
    with pytest.raises(FeatureFormatError, match="dimension mismatch"):
        loads_features(data + b"\0\0\0\0")
    with pytest.raises(FeatureFormatError, match="dimension mismatch"):
        loads_features(data, n_phonemes=83)


def test_deterministic_bytes(inventory, lexicon):
    assert dumps_features(give_matrix(inventory, lexicon)) == dumps_features(give_matrix(inventory, lexicon))


def test_csv_export(inventory, lexicon, tmp_path):
    m = give_matrix(inventory, lexicon)
    write_features_csv(m, tmp_path / "give.csv", inventory)
    lines = (tmp_path / "give.csv").read_text().splitlines()
    assert len(lines) == 1 + len(m.values)
    assert lines[0].split(",")[0] == "ph:" + inventory.tokens[0]
    assert lines[2].split(",")[-1] == "1.000000"
    assert lines[3].split(",")[-1] == "0.666667"


def test_ramps_feed_through(inventory):
    toks = tuple(AlignedToken(0, NoteContext(0, 0, 1.0, 0)) for _ in range(3))
    m = build_feature_matrix(compute_ramps(AlignedSequence(toks, "r")), DurationStats(1.0, 1.0), inventory)
    assert m.ramp_column.tolist() == [1.0, 0.5, 0.0]
