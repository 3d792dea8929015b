"""Phoneme-aware constrained decoding.

At each step the provider's ranked next-word candidates are scanned in rank
order and the first admissible one is appended:

* a function word is admitted if its rank is within ``function_window``;
* any other word must be at least ``min_word_length`` characters, appear in
  the dictionary, have been generated fewer than ``max_repetition`` times,
  and start (per G2P) with one of the two target phonemes.

Repetition limits bind content words only; function words may repeat.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .errors import EmptyDistributionError, EmptyInputError, ProviderError
from .lexicon import Lexicon, default_lexicon, tokenize, transcribe_word
from .lm.base import TokenCandidate
from .phonology import Phoneme, PhonemeFeatureTable, default_table
from .vocab import secondary_phoneme

TOPIC_PROMPT = 'Generate a tongue-twister on the topic of "{topic}"'

ADMIT_FUNCTION = "function"
ADMIT_CONTENT = "content"
REJECT_LENGTH = "length"
REJECT_DICTIONARY = "dictionary"
REJECT_REPETITION = "repetition"
REJECT_PHONEME = "phoneme"

COMPLETE = "complete"
EXHAUSTED = "exhausted_vocabulary"
PROVIDER_ERROR = "provider_error"


@lru_cache(maxsize=None)
def default_function_words() -> frozenset[str]:
    text = resources.files("tonguetwist.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(l.strip().lower() for l in text.splitlines() if l.strip() and not l.startswith("#"))


@dataclass(frozen=True)
class DecoderConfig:
    function_words: frozenset[str]
    dictionary: frozenset[str]
    wip: tuple[str, ...]
    max_length: int = 30
    function_window: int = 1
    min_word_length: int = 3
    max_repetition: int = 1
    scan_limit: int = 2500
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("max_length", "function_window", "min_word_length", "max_repetition", "scan_limit"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.function_words or not self.dictionary:
            raise ValueError("function word set and dictionary must be non-empty")
        if any(not any(ch.isalnum() for ch in w) for w in self.function_words):
            raise ValueError("function words may not be punctuation")
        if len(self.wip) < 2:
            raise ValueError("word-initial set needs at least two phonemes")

    @classmethod
    def default(cls, lex: Lexicon | None = None, table: PhonemeFeatureTable | None = None, **overrides):
        lex = default_lexicon() if lex is None else lex
        t = default_table() if table is None else table
        kw = dict(function_words=default_function_words(), dictionary=lex.headwords(),
                  wip=tuple(p.arpabet for p in t.word_initial_set()))
        kw.update(overrides)
        return cls(**kw)


@dataclass(frozen=True)
class Decision:
    admitted: bool
    reason: str


@dataclass(frozen=True)
class TraceStep:
    """One appended token, plus the higher-ranked candidates skipped on the way."""

    step: int
    token: str
    rank: int
    reason: str
    rejected: tuple[tuple[str, int, str], ...] = ()


@dataclass
class DecodeResult:
    prompt: str
    topic: str
    ph1: Phoneme
    ph2: Phoneme
    generated: list[str] = field(default_factory=list)
    status: str = COMPLETE
    trace: list[TraceStep] = field(default_factory=list)
    error: str | None = None

    @property
    def text(self) -> str:
        return " ".join(self.generated)

    def trace_lines(self) -> str:
        return "".join(json.dumps(asdict(s), ensure_ascii=False) + "\n" for s in self.trace)

    def to_dict(self) -> dict:
        return {"topic": self.topic, "prompt": self.prompt, "ph1": self.ph1.ipa, "ph2": self.ph2.ipa,
                "status": self.status, "generated": self.text,
                "trace": [asdict(s) for s in self.trace], "error": self.error}


class _InitialCache:
    def __init__(self, lex):
        self.lex = lex
        self._cache = {}

    def __call__(self, token):
        key = token.lower()
        if key not in self._cache:
            try:
                self._cache[key] = transcribe_word(key, self.lex).initial
            except EmptyInputError:
                self._cache[key] = None
        return self._cache[key]


def admissible(candidate: TokenCandidate, generated: Sequence[str], cfg: DecoderConfig,
               lex: Lexicon, ph1, ph2, initial_of=None) -> Decision:
    """Classify one candidate; the reject reason is the first failed check."""
    tok = candidate.token.lower()
    if tok in cfg.function_words and candidate.rank <= cfg.function_window:
        return Decision(True, ADMIT_FUNCTION)
    if len(tok) < cfg.min_word_length:
        return Decision(False, REJECT_LENGTH)
    if tok not in cfg.dictionary:
        return Decision(False, REJECT_DICTIONARY)
    if sum(1 for g in generated if g.lower() == tok) >= cfg.max_repetition:
        return Decision(False, REJECT_REPETITION)
    initial = (initial_of or _InitialCache(lex))(tok)
    targets = {getattr(ph1, "arpabet", ph1), getattr(ph2, "arpabet", ph2)}
    if initial not in targets:
        return Decision(False, REJECT_PHONEME)
    return Decision(True, ADMIT_CONTENT)


def pick_target_phonemes(topic: str, wip: Sequence, table: PhonemeFeatureTable | None = None,
                         rng_seed: int = 0, lex: Lexicon | None = None) -> tuple[Phoneme, Phoneme]:
    """Initial consonant of the topic's first word, else a seeded draw from ``wip``."""
    t = default_table() if table is None else table
    pool = [t.lookup(p) for p in wip]
    words = tokenize(topic)
    if not words:
        raise EmptyInputError(f"topic {topic!r} has no words to transcribe")
    first = t.lookup(transcribe_word(words[0], lex).initial)
    ph1 = first if first in pool else random.Random(rng_seed).choice(pool)
    return ph1, secondary_phoneme(ph1, pool, t)


def context_tokens(prompt: str) -> list[str]:
    return [w.lower() for w in tokenize(prompt)]


def decode(topic: str, provider, cfg: DecoderConfig, lex: Lexicon | None = None,
           table: PhonemeFeatureTable | None = None, prompt: str | None = None) -> DecodeResult:
    lex = default_lexicon() if lex is None else lex
    t = default_table() if table is None else table
    ph1, ph2 = pick_target_phonemes(topic, cfg.wip, t, cfg.rng_seed, lex)
    prompt = TOPIC_PROMPT.format(topic=topic) if prompt is None else prompt
    result = DecodeResult(prompt, topic, ph1, ph2)
    base = context_tokens(prompt)
    initial_of = _InitialCache(lex)

    while len(result.generated) < cfg.max_length:
        try:
            cands = provider.next_token_distribution(base + result.generated, cfg.scan_limit)
        except EmptyDistributionError:
            cands = []
        except ProviderError as exc:
            result.status, result.error = PROVIDER_ERROR, str(exc)
            return result
        chosen, rejected = None, []
        for c in cands[:cfg.scan_limit]:
            d = admissible(c, result.generated, cfg, lex, ph1, ph2, initial_of)
            if d.admitted:
                chosen = (c, d)
                break
            rejected.append((c.token, c.rank, d.reason))
        if chosen is None:
            result.status = EXHAUSTED
            return result
        c, d = chosen
        result.generated.append(c.token)
        result.trace.append(TraceStep(len(result.generated), c.token, c.rank, d.reason, tuple(rejected)))
    result.status = COMPLETE
    return result

