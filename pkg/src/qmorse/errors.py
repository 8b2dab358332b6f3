"""Error taxonomy shared by the library and the CLI exit codes."""


class QMorseError(Exception):
    """Base class for engine errors."""


class DomainError(QMorseError):
    """Input outside an operation's mathematical domain (CLI exit 3)."""


class ResourceError(QMorseError):
    """Term-count guard or cap overflow (CLI exit 4)."""


class ParseError(QMorseError):
    """Expression syntax error with position information (CLI exit 2)."""

    def __init__(self, message, offset, expected=()):
        super().__init__(message)
        self.offset = offset
        self.expected = tuple(expected)

    def __str__(self):
        base = super().__str__()
        if self.expected:
            return f"{base} at byte {self.offset} (expected {', '.join(self.expected)})"
        return f"{base} at byte {self.offset}"
