"""Pipeline configuration: key=value file, SCOREFEAT_* environment, flags.

Later sources win: defaults < config file < environment < command line.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from .augmenter import DEFAULT_SEMITONES, DEFAULT_TEMPO_FACTORS

ENV_PREFIX = "SCOREFEAT_"


class ConfigError(ValueError):
    pass


def _floats(text) -> tuple[float, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).replace(",", " ").split())


def _ints(text) -> tuple[int, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).replace(",", " ").split())


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _path(text):
    return None if text in (None, "") else Path(text)


@dataclass
class PipelineConfig:
    lexicon: Path | None = None
    inventory: Path | None = None
    corpus: Path | None = None
    out: Path = Path("out")
    octave_min: int = 2
    octave_max: int = 5
    segment_min_s: float = 20.0
    segment_max_s: float = 30.0
    test_target_s: float = 300.0
    mushra_max_s: float = 10.0
    semitones: tuple[int, ...] = DEFAULT_SEMITONES
    tempo_factors: tuple[float, ...] = DEFAULT_TEMPO_FACTORS
    seed: int = 0
    jobs: int = 1
    strict_inventory: bool = True

    @property
    def octave_range(self) -> tuple[int, int]:
        return (self.octave_min, self.octave_max)

    def validate(self) -> "PipelineConfig":
        for name in ("lexicon", "inventory"):
            p = getattr(self, name)
            if p is not None and not p.is_file():
                raise ConfigError(f"{name} file not found: {p}")
        if self.corpus is not None and not self.corpus.is_dir():
            raise ConfigError(f"corpus directory not found: {self.corpus}")
        if self.octave_max - self.octave_min != 3:
            raise ConfigError("octave range must cover exactly 4 octaves")
        if not self.segment_min_s < self.segment_max_s:
            raise ConfigError("segment_min_s must be smaller than segment_max_s")
        if self.test_target_s <= 0 or self.mushra_max_s <= 0:
            raise ConfigError("test_target_s and mushra_max_s must be positive")
        if any(f <= 0 for f in self.tempo_factors):
            raise ConfigError("tempo factors must be positive")
        if not self.semitones or not self.tempo_factors:
            raise ConfigError("augmentation sets must be nonempty")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        return self


_CONVERTERS = {
    "lexicon": _path, "inventory": _path, "corpus": _path, "out": Path,
    "octave_min": int, "octave_max": int,
    "segment_min_s": float, "segment_max_s": float, "test_target_s": float, "mushra_max_s": float,
    "semitones": _ints, "tempo_factors": _floats,
    "seed": int, "jobs": int, "strict_inventory": _bool,
}


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(config_path: str | Path | None = None, overrides: dict | None = None,
                 environ: dict | None = None) -> PipelineConfig:
    environ = os.environ if environ is None else environ
    raw: dict = {}
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        raw.update(parse_config_text(path.read_text(encoding="utf-8")))
    for f in fields(PipelineConfig):
        env_key = ENV_PREFIX + f.name.upper()
        if env_key in environ:
            raw[f.name] = environ[env_key]
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        converted = {k: _CONVERTERS[k](v) for k, v in raw.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return PipelineConfig(**converted)
