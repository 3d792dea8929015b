"""Provider contract shared by the n-gram model and the remote client."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

from ..errors import EmptyInputError

END = "</s>"
START = "<s>"

DEFAULT_MAX_TOKENS = 1000
DEFAULT_TEMPERATURE = 0.8


@dataclass(frozen=True)
class TokenCandidate:
    token: str
    logprob: float
    rank: int


@runtime_checkable
class Provider(Protocol):
    def next_token_distribution(self, context: Sequence[str], top_k: int) -> list[TokenCandidate]:
        """Top ``top_k`` next words, most probable first, ranks 1..k."""

    def score(self, tokens: Sequence[str]) -> list[float]:
        """Natural-log probability of each token, plus one final entry for the end marker."""


def rank_candidates(pairs, top_k: int) -> list[TokenCandidate]:
    """Order (token, logprob) pairs by probability, ties alphabetical; keep first duplicate."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    seen, uniq = set(), []
    for tok, lp in pairs:
        if tok not in seen:
            seen.add(tok)
            uniq.append((tok, float(lp)))
    uniq.sort(key=lambda x: (-x[1], x[0]))
    return [TokenCandidate(t, lp, i) for i, (t, lp) in enumerate(uniq[:top_k], 1)]


def perplexity(provider: Provider, tokens: Sequence[str]) -> float:
    """exp of the mean negative log-likelihood, end marker included."""
    tokens = list(tokens)
    if not tokens:
        raise EmptyInputError("perplexity of an empty text")
    logprobs = provider.score(tokens)
    if len(logprobs) != len(tokens) + 1:
        raise ValueError(f"provider returned {len(logprobs)} scores for {len(tokens)} tokens")
    if any(lp == -math.inf for lp in logprobs):
        return math.inf
    return math.exp(-sum(logprobs) / len(logprobs))


def generate_text(provider, prompt: str, max_tokens: int = DEFAULT_MAX_TOKENS,
                  temperature: float = DEFAULT_TEMPERATURE) -> str:
    return provider.generate(prompt, max_tokens=max_tokens, temperature=temperature)
