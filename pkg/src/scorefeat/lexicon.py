"""Phoneme inventory, pronunciation lexicon and word syllabification."""

from __future__ import annotations

import re
import unicodedata
import warnings
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

INVENTORY_SIZE = 84
SPECIAL_ROLES = ("start", "word_boundary", "pause")

# Legal English word onsets, used to place intervocalic consonants.
_SINGLE_ONSETS = "b ch d dh f g hh jh k l m n p r s sh t th v w y z zh".split()
_CLUSTER_ONSETS = """
    p r|p l|b r|b l|t r|d r|k r|k l|g r|g l|f r|f l|th r|sh r
    s p|s t|s k|s m|s n|s l|s w|s f|t w|d w|k w|g w|th w
    p y|b y|f y|v y|k y|g y|m y|hh y|n y|l y
    s p r|s p l|s t r|s k r|s k w|s k l|s p y|s k y
"""
DEFAULT_ONSETS = frozenset(
    [(c,) for c in _SINGLE_ONSETS]
    + [tuple(c.split()) for c in _CLUSTER_ONSETS.replace("\n", "|").split("|") if c.strip()]
)


class LexiconError(Exception):
    pass


class InventoryError(LexiconError):
    pass


class OOVError(LexiconError):
    """Raised with every out-of-vocabulary word of an utterance at once."""

    def __init__(self, words: Sequence[str]):
        self.words = list(words)
        super().__init__("out-of-vocabulary words: " + ", ".join(self.words))


class SyllabificationError(LexiconError):
    pass


def is_vowel(token: str) -> bool:
    """Vowel tokens are exactly the ones carrying a stress digit."""
    return token[-1:] in ("0", "1", "2")


@dataclass(frozen=True)
class PhonemeInventory:
    tokens: tuple[str, ...]
    start_id: int
    word_boundary_id: int
    pause_id: int
    _ids: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._ids.update({tok: i for i, tok in enumerate(self.tokens)})

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self._ids

    def id(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise KeyError(f"token {token!r} not in inventory") from None

    def token(self, token_id: int) -> str:
        return self.tokens[token_id]

    @property
    def start(self) -> str:
        return self.tokens[self.start_id]

    @property
    def word_boundary(self) -> str:
        return self.tokens[self.word_boundary_id]

    @property
    def pause(self) -> str:
        return self.tokens[self.pause_id]

    @property
    def special_ids(self) -> frozenset[int]:
        return frozenset((self.start_id, self.word_boundary_id, self.pause_id))


def _as_text(data: bytes | str) -> str:
    return data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data


def load_inventory(text: bytes | str, strict: bool = True) -> PhonemeInventory:
    """Read an inventory: one token per line, line order defines the IDs.

    An optional tab-separated second column flags the special tokens with
    one of ``start``, ``word_boundary`` or ``pause``. With ``strict`` the
    token count must be exactly 84; otherwise a different count only warns.
    """
    tokens: list[str] = []
    specials: dict[str, int] = {}
    for lineno, raw in enumerate(_as_text(text).splitlines(), 1):
        if not raw.strip():
            continue
        cols = raw.rstrip("\r\n").split("\t")
        token = cols[0].strip()
        if token in tokens:
            raise InventoryError(f"line {lineno}: duplicate token {token!r}")
        role = cols[1].strip() if len(cols) > 1 and cols[1].strip() else None
        if role is not None:
            if role not in SPECIAL_ROLES:
                raise InventoryError(f"line {lineno}: unknown special role {role!r}")
            if role in specials:
                raise InventoryError(f"line {lineno}: second token flagged as {role!r}")
            specials[role] = len(tokens)
        tokens.append(token)

    missing = [r for r in SPECIAL_ROLES if r not in specials]
    if missing:
        raise InventoryError(f"inventory lacks special token(s): {', '.join(missing)}")
    if len(tokens) != INVENTORY_SIZE:
        msg = f"inventory has {len(tokens)} tokens, expected {INVENTORY_SIZE}"
        if strict:
            raise InventoryError(msg)
        warnings.warn(msg, stacklevel=2)
    return PhonemeInventory(tuple(tokens), specials["start"], specials["word_boundary"], specials["pause"])


def default_inventory(strict: bool = True) -> PhonemeInventory:
    return load_inventory(resources.files("scorefeat").joinpath("data/inventory.txt").read_bytes(), strict)


@dataclass(frozen=True)
class Lexicon:
    """Uppercase word -> pronunciations, first-listed first."""

    entries: Mapping[str, tuple[tuple[str, ...], ...]]

    def __contains__(self, word):
        return word.upper() in self.entries

    def __len__(self):
        return len(self.entries)

    def pronunciations(self, word: str) -> tuple[tuple[str, ...], ...]:
        return self.entries[word.upper()]


_VARIANT_RE = re.compile(r"^(.+?)\((\d+)\)$")


def load_lexicon(text: bytes | str, inventory: PhonemeInventory) -> Lexicon:
    staged: dict[str, list[tuple[int, int, tuple[str, ...]]]] = {}
    for lineno, raw in enumerate(_as_text(text).splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        head, *phones = line.split()
        m = _VARIANT_RE.match(head)
        word, variant = (m.group(1), int(m.group(2))) if m else (head, 1)
        if not phones:
            raise LexiconError(f"line {lineno}: empty pronunciation for {word!r}")
        for ph in phones:
            if ph not in inventory:
                raise LexiconError(f"line {lineno}: unknown phoneme token {ph!r} in entry {head!r}")
            if inventory.id(ph) in inventory.special_ids:
                raise LexiconError(f"line {lineno}: special token {ph!r} inside a pronunciation")
            if ph[-1].isdigit() and ph[-1] not in "012":
                raise LexiconError(f"line {lineno}: stress digit out of range in {ph!r}")
        staged.setdefault(word.upper(), []).append((variant, lineno, tuple(phones)))
    entries = {w: tuple(p for _, _, p in sorted(v)) for w, v in staged.items()}
    return Lexicon(entries)


def default_lexicon(inventory: PhonemeInventory | None = None) -> Lexicon:
    inventory = inventory or default_inventory()
    return load_lexicon(resources.files("scorefeat").joinpath("data/lexicon.txt").read_bytes(), inventory)


def normalize_word(word: str) -> str:
    """Uppercase and drop punctuation; apostrophes between letters survive."""
    word = word.replace("’", "'")
    kept = []
    for i, ch in enumerate(word):
        if ch == "'" and 0 < i < len(word) - 1 and word[i - 1].isalpha() and word[i + 1].isalpha():
            kept.append(ch)
        elif not unicodedata.category(ch).startswith("P") and not ch.isspace():
            kept.append(ch)
    return "".join(kept).upper()


def phonemize(words: Iterable[str], lexicon: Lexicon) -> list[list[str]]:
    """Look up each word's first-listed pronunciation.

    Raises OOVError naming every unknown word (normalized) in one go.
    """
    normalized = [normalize_word(w) for w in words]
    oov = [w or "<empty>" for w in normalized if not w or w not in lexicon.entries]
    if oov:
        raise OOVError(list(dict.fromkeys(oov)))
    return [list(lexicon.entries[w][0]) for w in normalized]


def syllabify(
    pronunciation: Sequence[str],
    n_syllables: int,
    onsets: frozenset[tuple[str, ...]] = DEFAULT_ONSETS,
    word: str | None = None,
) -> list[list[str]]:
    """Split a pronunciation into ``n_syllables`` contiguous groups.

    Consonants between two vowels go to the following syllable as far as
    they form a legal onset (maximal onset); the rest close the preceding
    syllable. When the pronunciation has more vowels than requested
    syllables, the surplus trailing syllables are merged into the last group.
    """
    if n_syllables < 1:
        raise ValueError("n_syllables must be positive")
    tokens = list(pronunciation)
    if n_syllables == 1:
        return [tokens]
    nuclei = [i for i, t in enumerate(tokens) if is_vowel(t)]
    if len(nuclei) < n_syllables:
        name = word or " ".join(tokens)
        raise SyllabificationError(
            f"{name!r} has {len(nuclei)} vowel(s) but the score gives it {n_syllables} syllables")

    cuts = []
    for left, right in zip(nuclei, nuclei[1:]):
        cluster = tokens[left + 1:right]
        k = next(k for k in range(len(cluster) + 1)
                 if k == len(cluster) or tuple(cluster[k:]) in onsets)
        cuts.append(left + 1 + k)
    bounds = [0] + cuts[:n_syllables - 1] + [len(tokens)]
    return [tokens[a:b] for a, b in zip(bounds, bounds[1:])]
