"""CMU Pronouncing Dictionary loading and grapheme-to-phoneme transcription.

Words found in the lexicon use their first (primary) pronunciation. Anything
else goes through a deterministic longest-match letter-to-sound rule table
and is flagged as out-of-vocabulary.
"""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, TextIO

from .errors import EmptyInputError, FormatError
from .phonology import default_table, strip_stress

log = logging.getLogger(__name__)

_VARIANT = re.compile(r"^(.+?)\((\d+)\)$")
_EDGE_PUNCT = re.compile(r"^[^\w]+|[^\w]+$")
VOWELS = frozenset(p.arpabet for p in default_table() if not p.is_consonant)
DIGIT_NAMES = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"]


@dataclass(frozen=True)
class LexiconEntry:
    headword: str
    pronunciations: tuple[tuple[str, ...], ...]

    @property
    def primary(self) -> tuple[str, ...]:
        return self.pronunciations[0]


class Lexicon:
    """Headword -> pronunciations, plus an index by word-initial phoneme."""

    def __init__(self, entries: Iterable[LexiconEntry] = ()):
        self.entries: dict[str, LexiconEntry] = {e.headword: e for e in entries}
        index: dict[str, set[str]] = {}
        for word, entry in self.entries.items():
            index.setdefault(strip_stress(entry.primary[0]), set()).add(word)
        self.initial_index = {p: frozenset(ws) for p, ws in index.items()}

    def __len__(self):
        return len(self.entries)

    def __contains__(self, word):
        return word.lower() in self.entries

    def get(self, word: str) -> LexiconEntry | None:
        return self.entries.get(word.lower())

    def headwords(self) -> frozenset[str]:
        return frozenset(self.entries)

    def words_starting_with(self, phoneme: str) -> frozenset[str]:
        return self.initial_index.get(strip_stress(phoneme), frozenset())


def load_lexicon(source: TextIO | str, inventory: Iterable[str] | None = None) -> Lexicon:
    """Parse CMUDict-format text.

    Accepts ``WORD  PH1 PH2`` lines (one or two spaces), ``WORD(2)`` variant
    lines, ``;;;`` comment lines and trailing ``# ...`` comments.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    known = set(inventory) if inventory is not None else {p.arpabet for p in default_table()}
    prons: dict[str, list[tuple[str, ...]]] = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.split("#", 1)[0].strip() if "#" in raw else raw.strip()
        if not line or raw.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise FormatError(f"no pronunciation for {parts[0]!r}", lineno)
        head = parts[0]
        m = _VARIANT.match(head)
        if m:
            head = m.group(1)
        phones = tuple(parts[1:])
        for ph in phones:
            if strip_stress(ph) not in known:
                raise FormatError(f"unknown ARPABET symbol {ph!r}", lineno)
        prons.setdefault(head.lower(), []).append(phones)
    lex = Lexicon(LexiconEntry(w, tuple(p)) for w, p in prons.items())
    log.info("loaded %d lexicon entries", len(lex))
    return lex


@lru_cache(maxsize=None)
def default_lexicon() -> Lexicon:
    """The full CMU Pronouncing Dictionary as shipped by the ``cmudict`` package."""
    import cmudict

    with cmudict.dict_stream() as fh:
        return load_lexicon(io.TextIOWrapper(fh, encoding="latin-1"))


# ---------------------------------------------------------------------------
# letter-to-sound fallback

@dataclass(frozen=True)
class _Rule:
    grapheme: str
    phones: tuple[str, ...]
    start: bool
    end: bool


def parse_rules(text: str) -> list[_Rule]:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.startswith("#"):
            continue
        g, _, out = raw.partition("\t")
        start, end = g.startswith("^"), g.endswith("$") and len(g) > 1
        g = g.strip("^$") if len(g) > 1 else g
        if not g:
            raise FormatError("empty grapheme", lineno)
        rules.append(_Rule(g, tuple(out.split()), start, end))
    # longest grapheme first; anchored before unanchored at equal length
    rules.sort(key=lambda r: (-len(r.grapheme), -(r.start + r.end)))
    return rules


@lru_cache(maxsize=None)
def default_rules() -> tuple[_Rule, ...]:
    text = resources.files("tonguetwist.data").joinpath("g2p_rules.tsv").read_text("utf-8")
    return tuple(parse_rules(text))


def letter_to_sound(word: str, rules: Iterable[_Rule] | None = None) -> tuple[str, ...]:
    """Rule-based pronunciation guess, with stress 1 on the first vowel."""
    rules = default_rules() if rules is None else tuple(rules)
    w = word.lower()
    out = _apply_rules(w, rules, allow_silent_end=True)
    if not out:
        out = _apply_rules(w, rules, allow_silent_end=False)
    stressed, seen_vowel = [], False
    for p in out:
        if p in VOWELS:
            p += "0" if seen_vowel else "1"
            seen_vowel = True
        stressed.append(p)
    return tuple(stressed)


def _apply_rules(w, rules, allow_silent_end):
    out, i, n = [], 0, len(w)
    while i < n:
        for r in rules:
            g = r.grapheme
            if r.start and i != 0:
                continue
            if r.end and i + len(g) != n:
                continue
            if r.end and not r.phones and (not allow_silent_end or i == 0):
                continue
            if w.startswith(g, i):
                out.extend(r.phones)
                i += len(g)
                break
        else:
            i += 1  # character with no rule (digits are handled upstream)
    return out


# ---------------------------------------------------------------------------
# transcription

def normalize_token(token: str) -> str:
    """Strip leading/trailing punctuation; keep internal apostrophes and hyphens."""
    return _EDGE_PUNCT.sub("", token.replace("’", "'")).replace("_", "")


def tokenize(text: str) -> list[str]:
    """Whitespace split, edge punctuation stripped, empty tokens dropped."""
    out = []
    for raw in text.split():
        tok = normalize_token(raw)
        if tok:
            out.append(tok)
    return out


@dataclass(frozen=True)
class TranscribedWord:
    token: str
    arpabet: tuple[str, ...]  # stress digits preserved
    oov: bool

    @property
    def phonemes(self) -> tuple[str, ...]:
        return tuple(strip_stress(p) for p in self.arpabet)

    @property
    def initial(self) -> str:
        return strip_stress(self.arpabet[0])


@dataclass(frozen=True)
class Transcription:
    units: tuple[TranscribedWord, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.units)

    def __iter__(self):
        return iter(self.units)

    @property
    def words(self) -> list[str]:
        return [u.token for u in self.units]

    @property
    def phonemes(self) -> list[str]:
        """All phonemes in reading order, stress stripped."""
        return [p for u in self.units for p in u.phonemes]

    @property
    def initials(self) -> list[str]:
        return [u.initial for u in self.units]

    def arpabet(self) -> str:
        """Single space inside words, double space between words."""
        return "  ".join(" ".join(u.arpabet) for u in self.units)

    def ipa(self, table=None) -> str:
        """No separator inside words, single space between words."""
        t = default_table() if table is None else table
        return " ".join("".join(t.lookup(p).ipa for p in u.phonemes) for u in self.units)


def _lookup_part(part: str, lex: Lexicon) -> tuple[tuple[str, ...], bool]:
    entry = lex.get(part)
    if entry is not None:
        return entry.primary, False
    if part.isdigit():
        phones = []
        for ch in part:
            phones.extend(_lookup_part(DIGIT_NAMES[int(ch)], lex)[0])
        return tuple(phones), True
    return letter_to_sound(part), True


def transcribe_word(word: str, lex: Lexicon | None = None) -> TranscribedWord:
    lex = default_lexicon() if lex is None else lex
    tok = normalize_token(word)
    if not tok:
        raise EmptyInputError(f"token {word!r} is empty after normalization")
    key = tok.lower()
    entry = lex.get(key)
    if entry is not None:
        return TranscribedWord(tok, entry.primary, False)
    phones, oov = [], False
    for part in key.split("-"):
        part = part.strip("'")
        if not part:
            continue
        ph, part_oov = _lookup_part(part, lex)
        phones.extend(ph)
        oov = oov or part_oov
    if not phones:
        raise EmptyInputError(f"token {word!r} has no pronounceable letters")
    return TranscribedWord(tok, tuple(phones), oov)


def transcribe_text(text: str, lex: Lexicon | None = None) -> Transcription:
    lex = default_lexicon() if lex is None else lex
    units = []
    for tok in tokenize(text):
        try:
            units.append(transcribe_word(tok, lex))
        except EmptyInputError:
            log.debug("skipping unpronounceable token %r", tok)
    return Transcription(tuple(units))


_VOWEL_GROUPS = re.compile(r"[aeiouy]+")


def syllable_count(word: str, lex: Lexicon | None = None) -> int:
    """Vowel phonemes in the transcription; orthographic vowel groups as a last resort."""
    try:
        tw = transcribe_word(word, lex)
        n = sum(1 for p in tw.phonemes if p in VOWELS)
    except EmptyInputError:
        n = 0
    if n == 0:
        n = len(_VOWEL_GROUPS.findall(word.lower()))
    return max(1, n)
