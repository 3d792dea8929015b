"""HTTP client for a remote next-token provider.

Wire protocol (JSON bodies, UTF-8; the path carries the version):

    POST /v1/next_token  {"context": [...], "top_k": k}  -> {"candidates": [{"token", "logprob"}]}
    POST /v1/score       {"tokens": [...]}               -> {"logprobs": [...]}  (len(tokens) + 1)
    POST /v1/generate    {"prompt", "max_tokens", "temperature"} -> {"text": "..."}

Any non-2xx status is an error.
"""

from __future__ import annotations

import logging
import time
from typing import Sequence

import httpx

from ..errors import EmptyDistributionError, ProviderStatusError, ProviderTransportError
from .base import DEFAULT_MAX_TOKENS, DEFAULT_TEMPERATURE, TokenCandidate, rank_candidates

log = logging.getLogger(__name__)


class RemoteProvider:
    def __init__(self, base_url: str, timeout: float = 30.0, retries: int = 2,
                 backoff: float = 0.5, transport: httpx.BaseTransport | None = None):
        self.base_url = base_url.rstrip("/")
        self.retries = retries
        self.backoff = backoff
        self._client = httpx.Client(base_url=self.base_url, timeout=timeout, transport=transport)

    def close(self):
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _post(self, path: str, payload: dict) -> dict:
        attempt = 0
        while True:
            try:
                resp = self._client.post(path, json=payload)
            except httpx.TransportError as exc:
                if attempt >= self.retries:
                    raise ProviderTransportError(
                        f"{path} failed after {attempt + 1} attempts: {exc}") from exc
                log.warning("transport error on %s (%s); retrying", path, exc)
                time.sleep(self.backoff * (2 ** attempt))
                attempt += 1
                continue
            if not 200 <= resp.status_code < 300:
                raise ProviderStatusError(resp.status_code, resp.text)
            return resp.json()

    def next_token_distribution(self, context: Sequence[str], top_k: int) -> list[TokenCandidate]:
        data = self._post("/v1/next_token", {"context": list(context), "top_k": top_k})
        cands = data.get("candidates") or []
        if not cands:
            raise EmptyDistributionError(f"no candidates for context {list(context)[-5:]}")
        return rank_candidates(((c["token"], c["logprob"]) for c in cands), top_k)

    def score(self, tokens: Sequence[str]) -> list[float]:
        data = self._post("/v1/score", {"tokens": list(tokens)})
        return [float(x) for x in data["logprobs"]]

    def generate(self, prompt: str, max_tokens: int = DEFAULT_MAX_TOKENS,
                 temperature: float = DEFAULT_TEMPERATURE) -> str:
        data = self._post("/v1/generate", {"prompt": prompt, "max_tokens": max_tokens,
                                           "temperature": temperature})
        return data["text"]
