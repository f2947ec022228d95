"""Exception hierarchy. CLI maps ``PinetError`` to exit code 1, ``InvariantViolation`` to 2."""

from __future__ import annotations


class PinetError(Exception):
    """Base class for input and usage errors."""

    module = "pinet"


class InvariantViolation(PinetError):
    """An internal consistency check failed; indicates a bug, not bad input."""


class IngestError(PinetError):
    module = "corpus-ingest"

    def __init__(self, row: int, field: str, message: str, source: str | None = None):
        self.row = row
        self.field = field
        self.source = source
        super().__init__(message)

    def __str__(self):
        where = f"{self.source}:" if self.source else "row "
        return f"{where}{self.row} [{self.field}]: {self.args[0]}"


class MalformedRow(IngestError):
    pass


class BadTimestamp(IngestError):
    pass


class NegativeSize(IngestError):
    pass


class IoFailure(PinetError):
    module = "corpus-ingest"

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class OverlappingGroups(PinetError):
    module = "pinet-builder"


class UnknownUser(PinetError):
    module = "cpi-extractor"


class EmptyCpiList(PinetError):
    module = "cpi-extractor"


class MissingCpiForVertex(PinetError):
    module = "cpi-extractor"


class MissingAttributes(PinetError):
    module = "similarity-engine"


class NotDirectlyConnected(PinetError):
    module = "similarity-engine"


class SameVertex(PinetError):
    module = "similarity-engine"


class KTooLarge(PinetError):
    module = "community-clusterer"


class UniverseTooSmall(PinetError):
    module = "evolution-analyzer"


class DisjointVertexSets(PinetError):
    module = "evolution-analyzer"


class UnsupportedFormat(PinetError):
    module = "cli"


class ConfigError(PinetError):
    module = "cli"
