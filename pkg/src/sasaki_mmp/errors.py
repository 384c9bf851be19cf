"""Exception hierarchy shared by the engine and the command line."""


class SasakiMMPError(Exception):
    """Base class for all errors raised by this package."""


class ManifestError(SasakiMMPError, ValueError):
    """A manifest or command argument could not be parsed."""


class ValidationError(SasakiMMPError, ValueError):
    """A model violates one of its declared invariants.

    ``report`` holds one human-readable line per violation.
    """

    def __init__(self, report):
        self.report = list(report)
        super().__init__("; ".join(self.report) or "invalid model")


class EngineError(SasakiMMPError, ValueError):
    """An operation was applied to input outside its domain."""


class InternalConsistencyError(EngineError):
    """Exact arithmetic reached a state that valid input can never produce."""
