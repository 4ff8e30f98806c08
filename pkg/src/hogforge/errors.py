"""Exception taxonomy shared across the engine."""

from __future__ import annotations


class HogforgeError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HogforgeError):
    pass


class BudgetExhausted(HogforgeError):
    """The per-task victim query budget ran out mid-search."""


class VictimUnavailable(HogforgeError):
    """Transport failure talking to an external victim."""


class MalformedResponse(HogforgeError):
    """Victim response violated the wire schema."""


class UnknownBuiltin(HogforgeError):
    pass


class NoStructures(HogforgeError):
    """The unit has no transformable control-flow structure."""


class NoApplicableSite(HogforgeError):
    """Sampling found no structure kind with an applicable site."""


class InapplicableTransform(HogforgeError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class CaptureCollision(HogforgeError):
    def __init__(self, identifier: str, candidate: str):
        super().__init__(f"renaming {identifier!r} to {candidate!r} would collide")
        self.identifier = identifier
        self.candidate = candidate


class EmptyVocabulary(HogforgeError):
    pass


class NoAttempts(HogforgeError):
    pass


class PopulationTooSmall(HogforgeError):
    pass


class ZeroQueries(HogforgeError):
    pass


class NoVulnerableSamples(HogforgeError):
    pass


class SchemaError(HogforgeError):
    pass


class DuplicateId(HogforgeError):
    pass


class UnparseableInput(HogforgeError):
    pass
