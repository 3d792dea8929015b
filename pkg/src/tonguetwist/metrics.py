"""Phonemic overlap / edit-distance metrics and readability indices."""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable

from .errors import EmptyInputError, MissingAssetError
from .lexicon import Lexicon, Transcription, default_lexicon, syllable_count, tokenize, transcribe_text
from .phonology import PhonemeFeatureTable, default_table

READABILITY_INDICES = ("dale_chall", "flesch_kincaid", "gunning_fog", "ari")

# Column order of the flat metric record; part of the CLI output contract.
REPORT_FIELDS = ("id", "word_count", "phoneme_count", "po", "init_po", "iped", "oped",
                 "re_dale_chall", "re_flesch_kincaid", "re_gunning_fog", "re_ari")


def _as_transcription(t, lex=None) -> Transcription:
    return transcribe_text(t, lex) if isinstance(t, str) else t


def po(t, lex: Lexicon | None = None) -> float:
    """Unique phonemes over total phonemes (stress ignored). Lower means more overlap."""
    phones = _as_transcription(t, lex).phonemes
    if not phones:
        raise EmptyInputError("PO needs at least one phoneme")
    return len(set(phones)) / len(phones)


def init_po(t, lex: Lexicon | None = None) -> float:
    """Unique word-initial phonemes over number of words."""
    initials = _as_transcription(t, lex).initials
    if not initials:
        raise EmptyInputError("Init-PO needs at least one word")
    return len(set(initials)) / len(initials)


def _mean_transition(seq, table):
    t = default_table() if table is None else table
    return sum(t.distance(a, b) for a, b in zip(seq, seq[1:])) / (len(seq) - 1)


def iped(t, table: PhonemeFeatureTable | None = None, lex: Lexicon | None = None) -> float:
    """Mean weighted distance between consecutive word-initial phonemes."""
    initials = _as_transcription(t, lex).initials
    if len(initials) < 2:
        raise EmptyInputError("iPED needs at least two words")
    return _mean_transition(initials, table)


def oped(t, table: PhonemeFeatureTable | None = None, lex: Lexicon | None = None) -> float:
    """Mean weighted distance over every adjacent phoneme pair, across word boundaries."""
    phones = _as_transcription(t, lex).phonemes
    if len(phones) < 2:
        raise EmptyInputError("oPED needs at least two phonemes")
    return _mean_transition(phones, table)


# ---------------------------------------------------------------------------
# readability

_SENTENCE_END = re.compile(r"[.!?]+")


@dataclass(frozen=True)
class TextStats:
    words: int
    sentences: int
    characters: int
    syllables: int
    complex_words: int
    difficult_words: int | None


def count_sentences(text: str) -> int:
    parts = [p for p in _SENTENCE_END.split(text) if re.search(r"\w", p)]
    return max(1, len(parts))


def text_stats(text: str, lex: Lexicon | None = None, familiar: frozenset[str] | None = None) -> TextStats:
    words = tokenize(text)
    if not words:
        raise EmptyInputError("readability needs at least one word")
    syl = [syllable_count(w, lex) for w in words]
    difficult = None
    if familiar is not None:
        difficult = sum(1 for w in words if w.lower() not in familiar)
    return TextStats(
        words=len(words),
        sentences=count_sentences(text),
        characters=sum(sum(ch.isalnum() for ch in w) for w in words),
        syllables=sum(syl),
        complex_words=sum(1 for s in syl if s >= 3),
        difficult_words=difficult,
    )


def ari(s: TextStats) -> float:
    return 4.71 * (s.characters / s.words) + 0.5 * (s.words / s.sentences) - 21.43


def gunning_fog(s: TextStats) -> float:
    return 0.4 * ((s.words / s.sentences) + 100.0 * (s.complex_words / s.words))


def flesch_kincaid(s: TextStats) -> float:
    """Flesch-Kincaid grade level."""
    return 0.39 * (s.words / s.sentences) + 11.8 * (s.syllables / s.words) - 15.59


def dale_chall(s: TextStats) -> float:
    if s.difficult_words is None:
        raise MissingAssetError("Dale-Chall needs a familiar-word list")
    pct = 100.0 * s.difficult_words / s.words
    score = 0.1579 * pct + 0.0496 * (s.words / s.sentences)
    if pct > 5:
        score += 3.6365
    return score


_FORMULAS = {"dale_chall": dale_chall, "flesch_kincaid": flesch_kincaid,
             "gunning_fog": gunning_fog, "ari": ari}


def readability(text: str, index: str, lex: Lexicon | None = None,
                familiar: Iterable[str] | None = None) -> float:
    if index not in _FORMULAS:
        raise ValueError(f"unknown readability index {index!r}; choose from {READABILITY_INDICES}")
    if index == "dale_chall" and familiar is None:
        raise MissingAssetError("Dale-Chall needs a familiar-word list")
    fam = None if familiar is None else frozenset(w.lower() for w in familiar)
    return _FORMULAS[index](text_stats(text, lex, fam))


def load_word_list(path) -> frozenset[str]:
    """One token per line; blank lines and ``#`` comments ignored."""
    try:
        with open(path, encoding="utf-8") as fh:
            return frozenset(l.strip().lower() for l in fh if l.strip() and not l.startswith("#"))
    except FileNotFoundError:
        raise MissingAssetError(f"word list not found: {path}") from None


@lru_cache(maxsize=None)
def default_familiar_words() -> frozenset[str]:
    text = resources.files("tonguetwist.data").joinpath("dale_chall_familiar.txt").read_text("utf-8")
    return frozenset(l.strip().lower() for l in text.splitlines() if l.strip() and not l.startswith("#"))


# ---------------------------------------------------------------------------
# combined report

@dataclass
class MetricReport:
    id: str
    word_count: int
    phoneme_count: int
    po: float | None
    init_po: float | None
    iped: float | None
    oped: float | None
    re_dale_chall: float | None
    re_flesch_kincaid: float | None
    re_gunning_fog: float | None
    re_ari: float | None

    def as_row(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_FIELDS}

    def asdict(self):
        return asdict(self)


def _maybe(fn, *args):
    try:
        return fn(*args)
    except EmptyInputError:
        return None


def score_text(text: str, id: str = "", lex: Lexicon | None = None,
               table: PhonemeFeatureTable | None = None,
               familiar: Iterable[str] | None = None) -> MetricReport:
    """All metrics for one text. Metrics undefined for the input are None."""
    lex = default_lexicon() if lex is None else lex
    tr = transcribe_text(text, lex)
    fam = None if familiar is None else frozenset(w.lower() for w in familiar)
    stats = _maybe(text_stats, text, lex, fam)
    def index(fn):
        return None if stats is None else fn(stats)
    return MetricReport(
        id=id,
        word_count=len(tr),
        phoneme_count=len(tr.phonemes),
        po=_maybe(po, tr),
        init_po=_maybe(init_po, tr),
        iped=_maybe(iped, tr, table),
        oped=_maybe(oped, tr, table),
        re_dale_chall=None if fam is None else index(dale_chall),
        re_flesch_kincaid=index(flesch_kincaid),
        re_gunning_fog=index(gunning_fog),
        re_ari=index(ari),
    )


def mean(values: Iterable[float]) -> float:
    vals = [v for v in values if v is not None and not math.isnan(v)]
    if not vals:
        raise EmptyInputError("mean of no values")
    return sum(vals) / len(vals)
