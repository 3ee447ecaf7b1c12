"""Exception types shared across the package."""


class TabkgError(Exception):
    """Base class for data-level errors (CLI exit code 2)."""


class NTriplesParseError(TabkgError):
    """Malformed triple line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class GraphLoadError(TabkgError):
    """Graph-level problem at load time (e.g. a subclass cycle)."""


class EmptyTableError(TabkgError):
    """Table file contains no rows."""


class ConfigError(TabkgError):
    """Invalid run configuration."""


class EvaluationError(TabkgError):
    """Unparsable gold/prediction row; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
