"""Exception types shared across the package."""


class GraphCanonError(Exception):
    """Base class for all graphcanon errors."""


class ParameterError(GraphCanonError, ValueError):
    """A caller-supplied argument violates an operation's precondition."""


class RegimeError(ParameterError):
    """Requested parameter regime is invalid (e.g. below the connectivity threshold)."""


class ConfigError(GraphCanonError, ValueError):
    """An experiment or trial configuration is inconsistent."""


class ParseError(GraphCanonError, ValueError):
    """Malformed edge-list input. Carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
