"""Next-token providers: a local n-gram model and a remote HTTP client."""

from .base import END, START, Provider, TokenCandidate, generate_text, perplexity, rank_candidates
from .ngram import NGramModel, bundled_model, load, loads, train_ngram, uniform_model
from .remote import RemoteProvider


def open_provider(spec: str):
    """Resolve ``ngram:PATH``, ``ngram:bundled`` or ``remote:URL`` / a bare http(s) URL."""
    kind, _, arg = spec.partition(":")
    if kind == "ngram":
        return bundled_model() if arg in ("", "bundled") else load(arg)
    if kind == "remote":
        return RemoteProvider(arg)
    if kind in ("http", "https"):
        return RemoteProvider(spec)
    raise ValueError(f"unknown provider spec {spec!r}")


__all__ = [
    "END", "START", "Provider", "TokenCandidate", "generate_text", "perplexity",
    "rank_candidates", "NGramModel", "bundled_model", "load", "loads", "train_ngram",
    "uniform_model", "RemoteProvider", "open_provider",
]
