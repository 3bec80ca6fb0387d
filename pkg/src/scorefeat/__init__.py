"""Compile MusicXML scores with lyrics into phoneme-level note embeddings."""

from .aligner import AlignedSequence, AlignedToken, NoteContext, align, compute_ramps, note_duration_seconds
from .augmenter import AugmentationSpec, augmentation_grid, pitch_change_histogram, scale_tempo, transpose
from .embedder import (
    DurationStats,
    FeatureMatrix,
    build_feature_matrix,
    compute_duration_stats,
    read_features,
    write_features,
)
from .lexicon import (
    Lexicon,
    PhonemeInventory,
    default_inventory,
    default_lexicon,
    load_inventory,
    load_lexicon,
    phonemize,
    syllabify,
)
from .mushra import all_pairs_report, load_responses, summarize, welch_t_test
from .score import LyricSyllable, NoteEvent, Pitch, Score, parse_musicxml, score_from_events, validate_score
from .splitter import Segment, SplitResult, chunk_for_mushra, make_split, segment_score, shared_pitch_run

__version__ = "0.1.0"
