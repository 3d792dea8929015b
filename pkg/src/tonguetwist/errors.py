"""Exception types shared across the toolkit."""


class TwisterError(Exception):
    """Base class for all toolkit errors."""


class UnknownPhonemeError(TwisterError, KeyError):
    def __init__(self, symbol):
        self.symbol = symbol
        super().__init__(symbol)

    def __str__(self):
        return f"unknown phoneme: {self.symbol!r}"


class FormatError(TwisterError, ValueError):
    """A data file did not follow its documented format."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyInputError(TwisterError, ValueError):
    """An operation received input too small to be meaningful."""


class MissingAssetError(TwisterError, FileNotFoundError):
    """A required data asset (word list, bank, table) was not supplied."""


class EmptyCandidateListError(TwisterError, ValueError):
    """Neither phoneme bank produced any candidate word."""


class ProviderError(TwisterError):
    """Base class for language-model provider failures."""


class ProviderTransportError(ProviderError):
    """Transport-level failure talking to a remote provider. Retriable."""

    retriable = True


class ProviderStatusError(ProviderError):
    """The remote provider answered with a non-success status."""

    def __init__(self, status, body=""):
        self.status = status
        self.body = body
        super().__init__(f"provider returned HTTP {status}: {body[:200]}")


class EmptyDistributionError(ProviderError):
    """The provider returned no candidates for a context."""

    retriable = False
