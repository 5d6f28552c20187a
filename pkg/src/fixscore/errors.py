"""Exception hierarchy shared by scorers, extractors, loaders and the CLI."""


class FixScoreError(Exception):
    """Base class for all package errors."""


class ArgumentError(FixScoreError, ValueError):
    """An argument violates an operation's precondition."""


class ConfigurationError(FixScoreError):
    """Incompatible scorer/extractor/sample combination or bad settings."""


class ExtractorConfigError(ConfigurationError):
    """Invalid extractor specification; ``param`` names the offending field."""

    def __init__(self, message: str, param: str | None = None):
        super().__init__(message)
        self.param = param


class DegenerateFitError(FixScoreError):
    """Line fit is undetermined (fewer than two points or a single time)."""


class DegenerateAxisError(FixScoreError):
    """Circumplex anchors do not span two independent directions."""


class IngestionError(FixScoreError):
    """A required resource (embedding, lexicon entry, file) is missing."""


class ParseError(IngestionError):
    """Malformed input file; carries the location of the problem."""

    def __init__(self, message: str, path=None, line: int | None = None, field: str | None = None):
        where = ", ".join(
            part
            for part in (
                str(path) if path is not None else None,
                f"line {line}" if line is not None else None,
                f"field {field!r}" if field is not None else None,
            )
            if part
        )
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line
        self.field = field
