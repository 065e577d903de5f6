"""Exception hierarchy shared across the pipeline."""


class UavqadError(Exception):
    """Base class for all package errors."""


class DataError(UavqadError):
    """Malformed, missing, or schema-inconsistent input data."""


class ProtocolError(UavqadError):
    """A split or fold violates the group-aware protocol contract."""


class DegenerateSeedError(ProtocolError):
    """A seed produced a split that cannot be evaluated (e.g. single-class train)."""

    def __init__(self, seed: int, reason: str):
        self.seed = seed
        self.reason = reason
        super().__init__(f"seed {seed}: {reason}")
