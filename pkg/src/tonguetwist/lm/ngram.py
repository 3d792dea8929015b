"""Word-level add-k n-gram language model.

Conditional estimates use add-k smoothing over the vocabulary plus the end
marker. When a context was never observed the model backs off to the next
shorter context, so every conditional distribution stays normalized.

Words outside the vocabulary are scored as an unseen type at whichever
context level applies (probability ``k / (total + k*|V+1|)``).

Serialization is a line-oriented text file::

    # tonguetwist ngram v1
    order<TAB>3
    k<TAB>1.0
    vocab<TAB>word                  (one line per vocabulary word, sorted)
    count<TAB>n<TAB>w1 w2 ... wn    (one line per n-gram, sorted)

Re-serializing a parsed file reproduces it byte for byte.
"""

from __future__ import annotations

import io
import math
import random
from collections import Counter, defaultdict
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence, TextIO

from ..errors import EmptyInputError, FormatError
from ..lexicon import tokenize
from .base import END, START, TokenCandidate, rank_candidates

HEADER = "# tonguetwist ngram v1"


def sentence_tokens(line: str) -> list[str]:
    return [t.lower() for t in tokenize(line)]


class NGramModel:
    def __init__(self, order: int, k: float, counts: dict[tuple[str, ...], int],
                 vocab: Iterable[str] | None = None):
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        if not k > 0:
            raise ValueError("smoothing constant k must be positive")
        self.order = order
        self.k = float(k)
        self.counts = dict(counts)
        if vocab is None:
            vocab = {g[-1] for g in self.counts if g[-1] != END}
        self.vocab = tuple(sorted(vocab))
        self.outcomes = self.vocab + (END,)
        self._vocab_set = frozenset(self.vocab)

        self._followers: dict[tuple, dict[str, int]] = defaultdict(dict)
        self._totals: Counter = Counter()
        for gram, c in self.counts.items():
            ctx, w = gram[:-1], gram[-1]
            self._followers[ctx][w] = c
            self._totals[ctx] += c

    # -- estimation --------------------------------------------------------

    def _level(self, context: Sequence[str]) -> tuple[str, ...]:
        """Longest observed suffix of the padded context, at most order-1 long."""
        n = self.order - 1
        padded = (START,) * n + tuple(t.lower() for t in context)
        for m in range(n, 0, -1):
            ctx = padded[len(padded) - m:]
            if self._totals.get(ctx, 0) > 0:
                return ctx
        return ()

    def _prob_at(self, ctx, word):
        denom = self._totals[ctx] + self.k * len(self.outcomes)
        return (self._followers[ctx].get(word, 0) + self.k) / denom

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        return self._prob_at(self._level(context), word.lower() if word != END else END)

    def distribution(self, context: Sequence[str] = ()) -> dict[str, float]:
        ctx = self._level(context)
        return {w: self._prob_at(ctx, w) for w in self.outcomes}

    # -- provider contract ---------------------------------------------------

    def next_token_distribution(self, context: Sequence[str], top_k: int) -> list[TokenCandidate]:
        dist = self.distribution(context)
        dist.pop(END)
        return rank_candidates(((w, math.log(p)) for w, p in dist.items()), top_k)

    def score(self, tokens: Sequence[str]) -> list[float]:
        history: list[str] = []
        out = []
        for tok in list(tokens) + [END]:
            out.append(math.log(self.prob(tok, history)))
            history.append(tok.lower())
        return out

    def generate(self, prompt: str, max_tokens: int = 1000, temperature: float = 0.8,
                 seed: int = 0) -> str:
        """Sample a continuation of ``prompt``; temperature 0 is greedy."""
        rng = random.Random(seed)
        history = sentence_tokens(prompt)
        out = []
        for _ in range(max_tokens):
            dist = self.distribution(history)
            if temperature <= 0:
                word = min(dist, key=lambda w: (-dist[w], w))
            else:
                words = sorted(dist)
                weights = [dist[w] ** (1.0 / temperature) for w in words]
                word = rng.choices(words, weights)[0]
            if word == END:
                break
            out.append(word)
            history.append(word)
        return " ".join(out)

    # -- serialization -------------------------------------------------------

    def dumps(self) -> str:
        lines = [HEADER, f"order\t{self.order}", f"k\t{self.k!r}"]
        lines += [f"vocab\t{w}" for w in self.vocab]
        for gram in sorted(self.counts, key=lambda g: (len(g), g)):
            lines.append(f"count\t{self.counts[gram]}\t{' '.join(gram)}")
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    def __eq__(self, other):
        return isinstance(other, NGramModel) and self.dumps() == other.dumps()


def train_ngram(corpus: Iterable[str] | TextIO | str, order: int = 3, k: float = 1.0) -> NGramModel:
    """Count n-grams of every order up to ``order`` over one-sentence-per-line text."""
    if isinstance(corpus, str):
        corpus = io.StringIO(corpus)
    counts: Counter = Counter()
    pad = (START,) * (order - 1)
    vocab = set()
    for line in corpus:
        toks = sentence_tokens(line)
        if not toks:
            continue
        vocab.update(toks)
        seq = pad + tuple(toks) + (END,)
        for i in range(len(pad), len(seq)):
            for n in range(1, order + 1):
                counts[seq[i - n + 1:i + 1]] += 1
    if not vocab:
        raise EmptyInputError("corpus has no tokens")
    return NGramModel(order, k, counts, vocab)


def uniform_model(vocab: Iterable[str]) -> NGramModel:
    """Unigram model giving every word and the end marker the same probability."""
    vocab = sorted(set(vocab))
    if not vocab:
        raise EmptyInputError("uniform model needs a vocabulary")
    return NGramModel(1, 1.0, {(w,): 1 for w in vocab + [END]}, vocab)


def loads(text: str | TextIO) -> NGramModel:
    if isinstance(text, str):
        text = io.StringIO(text)
    order = k = None
    vocab, counts = [], {}
    for lineno, raw in enumerate(text, 1):
        line = raw.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition("\t")
        try:
            if key == "order":
                order = int(rest)
            elif key == "k":
                k = float(rest)
            elif key == "vocab":
                vocab.append(rest)
            elif key == "count":
                c, _, gram = rest.partition("\t")
                counts[tuple(gram.split(" "))] = int(c)
            else:
                raise FormatError(f"unknown record {key!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(str(exc), lineno) from None
    if order is None or k is None:
        raise FormatError("missing order or k header")
    return NGramModel(order, k, counts, vocab)


def load(path) -> NGramModel:
    with open(path, encoding="utf-8") as fh:
        return loads(fh)


@lru_cache(maxsize=None)
def bundled_model(order: int = 3, k: float = 0.1) -> NGramModel:
    """Trigram model over the bundled demo corpus."""
    text = resources.files("tonguetwist.data").joinpath("corpus.txt").read_text("utf-8")
    return train_ngram(text, order=order, k=k)
