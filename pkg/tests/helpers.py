"""Shared builders: hand-written MusicXML snippets, on-disk corpora, MUSHRA data."""

from pathlib import Path

from scorefeat.score import score_from_events, write_musicxml

# Student-t CDF at t = 1, 2, 5 per df, frozen from adaptive quadrature of the
# density (scipy.integrate.quad, epsabs=epsrel=1e-14).
T_CDF_ORACLE = {
    1: (0.75, 0.8524163823495666, 0.9371670418109987),
    2: (0.7886751345948129, 0.908248290463863, 0.981125224324688),
    10: (0.8295534338489704, 0.9633059826146303, 0.9997313331986222),
    100: (0.8401379221079294, 0.9758939106344207, 0.99999877491328),
}

REPORTED_MEANS = {"reference": 81.62, "system": 60.45, "baseline": 30.82}


def musicxml(measures: str, divisions: int = 1, tempo: float | None = 120, beats: int = 4,
             beat_type: int = 4, extra_parts: str = "") -> bytes:
    """Wrap measure bodies in a single-part partwise document.

    ``measures`` is the XML for the notes of each measure, separated by "|".
    The first measure gets divisions/time/tempo.
    """
    out = []
    for i, body in enumerate(measures.split("|")):
        head = ""
        if i == 0:
            head = (f"<attributes><divisions>{divisions}</divisions>"
                    f"<time><beats>{beats}</beats><beat-type>{beat_type}</beat-type></time></attributes>")
            if tempo is not None:
                head += f'<direction><direction-type/><sound tempo="{tempo}"/></direction>'
        out.append(f'<measure number="{i + 1}">{head}{body}</measure>')
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<score-partwise version="3.1"><part-list><score-part id="P1"><part-name>V</part-name>'
        f'</score-part></part-list><part id="P1">{"".join(out)}</part>{extra_parts}</score-partwise>'
    ).encode()


def note(step: str, octave: int, duration: int, alter: int = 0, extra: str = "") -> str:
    alter_xml = f"<alter>{alter}</alter>" if alter else ""
    return (f"<note><pitch><step>{step}</step>{alter_xml}<octave>{octave}</octave></pitch>"
            f"<duration>{duration}</duration>{extra}</note>")


def rest(duration: int, extra: str = "") -> str:
    return f"<note><rest/><duration>{duration}</duration>{extra}</note>"


def write_corpus(directory: Path, songs: dict) -> Path:
    """Write ``{name: events}`` as ``name.musicxml`` files (qpm 60, 1 division)."""
    directory.mkdir(parents=True, exist_ok=True)
    for name, events in songs.items():
        (directory / f"{name}.musicxml").write_bytes(write_musicxml(score_from_events(events, qpm=60)))
    return directory


def cycle(names, n, word="la"):
    return [(names[i % len(names)], 1, word) for i in range(n)]


def reported_means_csv(n_listeners: int = 40, n_chunks: int = 74, spread: float = 12.0) -> str:
    """Ratings alternating mean - spread / mean + spread, so each mean is exact."""
    rows = ["listener_id,chunk_id,system_id,score"]
    for system, mean in REPORTED_MEANS.items():
        k = 0
        for listener in range(n_listeners):
            for chunk in range(n_chunks):
                score = mean + spread if k % 2 else mean - spread
                rows.append(f"L{listener},c{chunk},{system},{score!r}")
                k += 1
    return "\n".join(rows) + "\n"
