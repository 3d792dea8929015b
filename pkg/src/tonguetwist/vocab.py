"""Topic sampling, phoneme-pair selection and phoneme-constrained word banks.

This is the front half of the twister-listing pipeline: pick a topic phrase
and a primary phoneme, find its closest word-initial neighbour, then pull
the words from the lexicon that start with either phoneme and rank them by
cosine similarity to the topic.
"""

from __future__ import annotations

import io
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import EmptyCandidateListError, EmptyInputError, FormatError
from .lexicon import Lexicon, tokenize
from .phonology import Phoneme, PhonemeFeatureTable, default_table, nearest_phoneme

DEFAULT_N = 10


@dataclass(frozen=True)
class TopicPhrase:
    modifier: str
    noun: str

    def __str__(self):
        return f"{self.modifier} {self.noun}"

    @property
    def tokens(self) -> list[str]:
        return [self.modifier, self.noun]


class EmbeddingTable:
    def __init__(self, vectors: dict[str, np.ndarray]):
        dims = {v.shape for v in vectors.values()}
        if len(dims) > 1:
            raise ValueError(f"vectors disagree on dimension: {sorted(dims)}")
        self.vectors = vectors
        self.dimension = dims.pop()[0] if dims else 0

    def __contains__(self, token):
        return token.lower() in self.vectors

    def __len__(self):
        return len(self.vectors)

    def get(self, token):
        return self.vectors.get(token.lower())

    def dumps(self, precision: int = 6) -> str:
        return "".join(f"{w} {' '.join(f'{x:.{precision}f}' for x in v)}\n"
                       for w, v in sorted(self.vectors.items()))


def load_embeddings(source: TextIO | str) -> EmbeddingTable:
    """Parse ``token v1 ... vd`` lines (word2vec text style; a ``count dim`` header is skipped)."""
    if isinstance(source, str):
        source = io.StringIO(source)
    vectors, dim = {}, None
    for lineno, raw in enumerate(source, 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            continue
        try:
            vec = np.array([float(x) for x in parts[1:]])
        except ValueError:
            raise FormatError("non-numeric vector component", lineno) from None
        if dim is None:
            dim = len(vec)
        if len(vec) != dim or dim == 0:
            raise FormatError(f"expected {dim} components, got {len(vec)}", lineno)
        vectors[parts[0].lower()] = vec
    return EmbeddingTable(vectors)


@lru_cache(maxsize=None)
def default_embeddings() -> EmbeddingTable:
    text = resources.files("tonguetwist.data").joinpath("embeddings.txt").read_text("utf-8")
    return load_embeddings(text)


def cooccurrence_embeddings(lines: Iterable[str], dim: int = 32, window: int = 4) -> EmbeddingTable:
    """Positive-PMI + truncated SVD word vectors from raw sentences.

    Used to build the small demo table shipped with the package; any
    word2vec-style text file can replace it.
    """
    sents = [[t.lower() for t in tokenize(l)] for l in lines]
    vocab = sorted({t for s in sents for t in s})
    idx = {w: i for i, w in enumerate(vocab)}
    co = np.zeros((len(vocab), len(vocab)))
    for s in sents:
        for i, w in enumerate(s):
            for j in range(max(0, i - window), min(len(s), i + window + 1)):
                if j != i:
                    co[idx[w], idx[s[j]]] += 1.0 / abs(i - j)
    total = co.sum()
    rows = co.sum(axis=1, keepdims=True)
    cols = co.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        pmi = np.log(co * total / (rows * cols))
    ppmi = np.where(np.isfinite(pmi) & (pmi > 0), pmi, 0.0)
    u, s, _ = np.linalg.svd(ppmi, full_matrices=False)
    k = min(dim, len(s))
    vecs = u[:, :k] * np.sqrt(s[:k])
    # fix the SVD sign ambiguity so output is reproducible across LAPACK builds
    signs = np.sign(vecs[np.abs(vecs).argmax(axis=0), range(k)])
    vecs = vecs * signs
    return EmbeddingTable({w: vecs[i] for w, i in idx.items()})


def embed_phrase(tokens: Sequence[str], emb: EmbeddingTable) -> np.ndarray:
    """Mean of the available token vectors; tokens without a vector are skipped."""
    vecs = [emb.get(t) for t in tokens]
    vecs = [v for v in vecs if v is not None]
    if not vecs:
        raise EmptyInputError(f"no embedding for any of {list(tokens)}")
    return np.mean(vecs, axis=0)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


# ---------------------------------------------------------------------------
# topics and phoneme pairs

def load_pos_list(source: TextIO | str) -> list[str]:
    if isinstance(source, str):
        source = io.StringIO(source)
    return [l.strip() for l in source if l.strip() and not l.startswith("#")]


@lru_cache(maxsize=None)
def default_pos_lists() -> tuple[tuple[str, ...], tuple[str, ...]]:
    data = resources.files("tonguetwist.data")
    mods = load_pos_list(data.joinpath("modifiers.txt").read_text("utf-8"))
    nouns = load_pos_list(data.joinpath("nouns.txt").read_text("utf-8"))
    return tuple(mods), tuple(nouns)


def sample_topic(rng_seed: int, modifiers: Sequence[str], nouns: Sequence[str]) -> TopicPhrase:
    if not modifiers or not nouns:
        raise EmptyInputError("topic sampling needs non-empty modifier and noun lists")
    rng = random.Random(rng_seed)
    return TopicPhrase(rng.choice(list(modifiers)), rng.choice(list(nouns)))


def word_initial_set(table: PhonemeFeatureTable | None = None) -> list[Phoneme]:
    return (default_table() if table is None else table).word_initial_set()


def secondary_phoneme(ph1, wip: Sequence, table: PhonemeFeatureTable | None = None) -> Phoneme:
    """Closest other member of ``wip``; earlier entries win ties."""
    t = default_table() if table is None else table
    p1 = t.lookup(ph1)
    others = [p for p in (t.lookup(x) for x in wip) if p != p1]
    if not others:
        raise EmptyInputError("need at least one other phoneme to pair with")
    return nearest_phoneme(p1, others, t)


def select_phoneme_pair(topic, wip: Sequence, rng_seed: int,
                        table: PhonemeFeatureTable | None = None) -> tuple[Phoneme, Phoneme]:
    """Seeded uniform draw of the primary phoneme, nearest neighbour as secondary.

    The topic text is mixed into the seed so that one pipeline seed still
    spreads different topics over different phonemes.
    """
    t = default_table() if table is None else table
    pool = [t.lookup(p) for p in wip]
    if len(pool) < 2:
        raise EmptyInputError("word-initial set needs at least two phonemes")
    ph1 = random.Random(f"{rng_seed}:{topic}").choice(pool)
    return ph1, secondary_phoneme(ph1, pool, t)


# ---------------------------------------------------------------------------
# candidate words

@dataclass(frozen=True)
class ScoredWord:
    token: str
    initial: str
    score: float


@dataclass
class CandidateList:
    topic: object
    ph1: Phoneme
    ph2: Phoneme
    words: list[ScoredWord] = field(default_factory=list)
    seed: int = 0

    @property
    def tokens(self) -> list[str]:
        return [w.token for w in self.words]


def _topic_tokens(topic) -> list[str]:
    if isinstance(topic, TopicPhrase):
        return topic.tokens
    return [t.lower() for t in tokenize(str(topic))]


def candidate_words(lex: Lexicon, ph, topic, emb: EmbeddingTable, n: int = DEFAULT_N,
                    table: PhonemeFeatureTable | None = None) -> list[ScoredWord]:
    """Top ``n`` lexicon words starting with ``ph`` by cosine to the topic; ties alphabetical."""
    if n < 1:
        raise ValueError("n must be >= 1")
    t = default_table() if table is None else table
    code = t.lookup(ph).arpabet
    try:
        target = embed_phrase(_topic_tokens(topic), emb)
    except EmptyInputError:
        return []
    scored = []
    for word in lex.words_starting_with(code):
        vec = emb.get(word)
        if vec is None:
            continue
        s = cosine(target, vec)
        if math.isfinite(s):
            scored.append(ScoredWord(word, code, s))
    scored.sort(key=lambda w: (-w.score, w.token))
    return scored[:n]


def build_candidate_list(topic, wip: Sequence, lex: Lexicon, emb: EmbeddingTable,
                         n: int = DEFAULT_N, rng_seed: int = 0,
                         table: PhonemeFeatureTable | None = None,
                         pair: tuple | None = None) -> CandidateList:
    """Both phoneme banks merged and shuffled so the two sounds alternate.

    ``pair`` overrides the seeded phoneme choice.
    """
    t = default_table() if table is None else table
    ph1, ph2 = pair if pair is not None else select_phoneme_pair(topic, wip, rng_seed, t)
    ph1, ph2 = t.lookup(ph1), t.lookup(ph2)
    words = candidate_words(lex, ph1, topic, emb, n, t) + candidate_words(lex, ph2, topic, emb, n, t)
    if not words:
        raise EmptyCandidateListError(f"no candidates for {topic} with {ph1}/{ph2}")
    random.Random(rng_seed).shuffle(words)
    return CandidateList(topic, ph1, ph2, words, rng_seed)


def bank_sizes(cl: CandidateList) -> Counter:
    return Counter(w.initial for w in cl.words)
