"""Exception hierarchy shared by the whole engine.

Every error the library raises on bad input, bad statistics, or a failing
backend derives from :class:`ArsEngineError`, so callers (CLI, service) can
map failure classes to exit codes and HTTP statuses in one place.
"""

from __future__ import annotations


class ArsEngineError(Exception):
    """Base class for all engine errors."""


class InputError(ArsEngineError):
    """Malformed or inconsistent caller-supplied data."""


class CorpusFormatError(InputError):
    """A corpus or data file violates its declared schema."""


class DegenerateStatsError(ArsEngineError):
    """Corpus statistics admit no usable scale (e.g. zero spread)."""


class ProviderError(ArsEngineError):
    """A sentiment or embedding backend failed to produce a value."""


class LookupMissError(ProviderError):
    """A table-backed provider has no entry for the requested text."""
